//! Segment a review set and summary, merge alignment highlights and print the
//! interchange document.

use fusebench::corpus::interchange::to_json;
use fusebench::corpus::{validate_instance, Alignment, Document, FicInstance, Highlight, Origin, ReviewSet, Span, Split};

fn main() -> fusebench::Result<()> {
    let reviews = vec![
        Document::new("r0", "The pool was great. Staff at the front desk (e.g. Mr. Lee) were rude."),
        Document::new("r1", "Great pool and clean rooms. Breakfast was cold."),
    ];
    let summary = Document::new("s0", "The pool is great. Rooms are clean but the staff can be rude.");

    for doc in reviews.iter().chain([&summary]) {
        println!("{}: {} tokens, sentences:", doc.id, doc.tokens.len());
        for i in 0..doc.sentences.len() {
            println!("  [{i}] {}", doc.sentence_text(i).unwrap());
        }
    }

    let align = |sentence, review: &str, spans: &[(usize, usize)]| Alignment {
        summary_sentence_index: sentence,
        summary_spans: vec![],
        highlight: Highlight { review_id: review.into(), spans: spans.iter().copied().map(Span::from).collect() },
        aspect_label: None,
        annotator_id: "demo".into(),
    };
    // The two r1 highlights touch at offset 10 and merge into one.
    let alignments = vec![
        align(0, "r0", &[(0, 19)]),
        align(0, "r1", &[(0, 10)]),
        align(1, "r1", &[(10, 26)]),
        align(1, "r0", &[(20, 69)]),
    ];
    let review_set = ReviewSet { id: "hotel".into(), reviews, origin: Origin::Other };
    let instance = FicInstance::new("hotel__s0", review_set, summary, alignments, Split::Train);

    println!("\nmerged highlights:");
    for m in instance.merged_highlights() {
        let review = instance.review(&m.highlight.review_id).unwrap();
        println!("  {} {:?} -> sentences {:?}: {:?}", m.highlight.review_id, m.highlight.spans, m.aligned_sentences, m.highlight.text(review));
    }
    println!("violations: {:?}", validate_instance(&instance));
    println!("\n{}", to_json(&instance)?);
    Ok(())
}
