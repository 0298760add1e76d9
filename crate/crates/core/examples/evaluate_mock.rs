//! Score two systems against one instance with a scripted in-process scorer.

use fusebench::corpus::interchange::parse_instance;
use fusebench::corpus::SystemOutput;
use fusebench::gateway::{FnScorer, ScorerKind, ScorerRequest};
use fusebench::metrics::{evaluate_outputs, harmonic_mean, render_results_table, EvalConfig};

const INSTANCE: &str = r#"{
    "instance_id": "hotel__s0", "split": "test", "origin": "Other",
    "reviews": [{"id": "r0", "text": "The pool was great. Staff were rude."},
                {"id": "r1", "text": "Great pool and clean rooms."}],
    "summary": {"id": "s0", "text": "The pool is great. Rooms are clean."},
    "alignments": [
        {"summary_sentence_index": 0, "summary_spans": [], "review_id": "r0", "highlight_spans": [[0, 19]], "annotator_id": "a"},
        {"summary_sentence_index": 1, "summary_spans": [], "review_id": "r1", "highlight_spans": [[15, 26]], "annotator_id": "a"}
    ]
}"#;

#[tokio::main]
async fn main() -> fusebench::Result<()> {
    let instance = parse_instance(INSTANCE)?;
    // A toy judge: a sentence is entailed if it shares a word with the premise,
    // a highlight is covered if its last word appears in the passage.
    let scorer = FnScorer::new(|r: &ScorerRequest| {
        let words = |s: &str| s.to_lowercase().split(|c: char| !c.is_alphanumeric()).filter(|w| w.len() > 3).map(String::from).collect::<Vec<_>>();
        let (premise, hypothesis) = (words(&r.premise_or_context), words(&r.hypothesis_or_query));
        Ok(match r.kind {
            ScorerKind::Containment => if hypothesis.last().is_some_and(|w| premise.contains(w)) { 0.95 } else { 0.05 },
            _ => if hypothesis.iter().any(|w| premise.contains(w)) { 0.9 } else { 0.1 },
        })
    });
    let outputs = vec![
        SystemOutput::new("hotel__s0", "faithful", "The pool is great and the rooms are clean."),
        SystemOutput::new("hotel__s0", "chatty", "The pool is great. The spa is world class."),
    ];
    let reports = evaluate_outputs(&[instance], &outputs, &scorer, &EvalConfig::default()).await?;
    let rows: Vec<_> = reports.iter().map(|r| (r.system_id.clone(), r.faithfulness, r.coverage, harmonic_mean(r.faithfulness, r.coverage))).collect();
    println!("{}", render_results_table(&rows));
    for r in &reports {
        let lexical: Vec<String> = r.lexical.iter().map(|(k, v)| format!("{k}={:.3}", v.value)).collect();
        println!("{}: per-sentence {:?}  {}", r.system_id, r.per_sentence_faithfulness, lexical.join(" "));
    }
    Ok(())
}
