//! Token IoU between two annotators of one instance, plus Cohen's kappa.

use fusebench::corpus::interchange::parse_instance;
use fusebench::corpus::{Alignment, Highlight, Span};
use fusebench::metrics::{cohens_kappa, iou_agreement_with, IouAggregation};

fn main() -> fusebench::Result<()> {
    let instance = parse_instance(
        r#"{"instance_id": "h__s", "split": "dev", "origin": "Other",
            "reviews": [{"id": "r0", "text": "The pool was great and the water was warm. Staff were rude."}],
            "summary": {"id": "s", "text": "A great, warm pool. Rude staff."}}"#,
    )?;
    let align = |sentence, start, end| Alignment {
        summary_sentence_index: sentence,
        summary_spans: vec![],
        highlight: Highlight { review_id: "r0".into(), spans: vec![Span::from((start, end))] },
        aspect_label: None,
        annotator_id: String::new(),
    };
    let a = vec![align(0, 0, 42), align(1, 43, 59)];
    let b = vec![align(0, 0, 19), align(1, 43, 59)];
    for aggregation in [IouAggregation::SentenceMean, IouAggregation::Pooled] {
        let iou = iou_agreement_with(&a, &b, &instance, aggregation)?;
        println!("{aggregation:?}: overall {:.2}, per sentence {:?}", iou.overall, iou.per_sentence);
    }
    let labels_a = [true, true, false, false, true, false];
    let labels_b = [true, false, false, false, true, true];
    println!("kappa {:.4}", cohens_kappa(&labels_a, &labels_b)?);
    Ok(())
}
