//! Assemble instances from pairs and alignments, assign splits, then derive
//! statistics, coverage-classifier data and model inputs.

use fusebench::corpus::{Alignment, Document, Highlight, Origin, ReviewSet, Span};
use fusebench::dataset::{
    assemble_instances, assign_splits, build_kshot_prompt, compute_statistics, generate_coverage_training_data, render_input, Corpus,
    EncodingConfig, EncodingMode, PairAlignment, SplitRatios,
};

fn main() -> fusebench::Result<()> {
    let mut corpus = Corpus::default();
    for (i, (r0, r1, summary)) in [
        ("The pool was great. Staff were rude.", "Great pool and clean rooms.", "The pool is great. Rooms are clean."),
        ("Breakfast was cold. The bed was huge.", "Huge bed, cold food.", "The bed is huge. Breakfast is served cold."),
        ("Noisy street. Quiet room though.", "The room was quiet.", "Rooms are quiet. The street is noisy."),
    ]
    .into_iter()
    .enumerate()
    {
        let id = format!("set{i}");
        let reviews = vec![Document::new("r0", r0), Document::new("r1", r1)];
        corpus.review_sets.insert(id.clone(), ReviewSet { id: id.clone(), reviews, origin: Origin::Other });
        corpus.summaries.insert((id, "s0".into()), Document::new("s0", summary));
    }

    let pa = |set: &str, sentence, review: &str, span: (usize, usize)| PairAlignment {
        review_set_id: set.into(),
        summary_id: "s0".into(),
        alignment: Alignment {
            summary_sentence_index: sentence,
            summary_spans: vec![],
            highlight: Highlight { review_id: review.into(), spans: vec![Span::from(span)] },
            aspect_label: None,
            annotator_id: "demo".into(),
        },
    };
    let alignments = vec![
        pa("set0", 0, "r0", (0, 19)),
        pa("set0", 0, "r1", (0, 10)),
        pa("set0", 1, "r1", (15, 26)),
        pa("set1", 0, "r0", (20, 37)),
        pa("set1", 1, "r0", (0, 19)),
        pa("set1", 1, "r1", (10, 19)),
        pa("set2", 0, "r0", (14, 32)),
        pa("set2", 1, "r0", (0, 13)),
    ];

    let ids: Vec<&String> = corpus.review_sets.keys().collect();
    let plan = assign_splits(&ids, SplitRatios::new(0.34, 0.33, 0.33)?, 1);
    let (instances, warnings) = assemble_instances(&corpus, &alignments, &plan)?;
    println!("{} instances, {} warnings", instances.len(), warnings.len());
    println!("{}", compute_statistics(&instances)?.render_text());

    let data = generate_coverage_training_data(&instances[0], 7)?;
    for s in &data.samples {
        println!("{:>3}  {:?}  |  {:?}", format!("{:?}", s.label), s.highlight_text, s.modified_summary);
    }

    let config = EncodingConfig::default();
    for mode in [EncodingMode::WithHighlights, EncodingMode::OnlyHighlights, EncodingMode::NoHighlights] {
        println!("\n{mode:?}:\n{}", render_input(&instances[0], mode, &config)?.text);
    }
    let exemplar = (render_input(&instances[1], EncodingMode::WithHighlights, &config)?, instances[1].fused_text.text.clone());
    let target = render_input(&instances[2], EncodingMode::WithHighlights, &config)?;
    println!("\n{}", build_kshot_prompt(&[exemplar], &target, 1)?);
    Ok(())
}
