//! Submit three systems to a fresh leaderboard and print the ranking.

use fusebench::corpus::interchange::parse_instance;
use fusebench::gateway::{FnScorer, ScorerKind, ScorerRequest};
use fusebench::leaderboard::{Leaderboard, SubmissionLine};
use fusebench::metrics::EvalConfig;

#[tokio::main]
async fn main() -> fusebench::Result<()> {
    let instances = vec![
        parse_instance(
            r#"{"instance_id": "a__s", "split": "test", "origin": "Other",
                "reviews": [{"id": "r0", "text": "The pool was great. Staff were rude."}],
                "summary": {"id": "s", "text": "Great pool, rude staff."},
                "alignments": [{"summary_sentence_index": 0, "summary_spans": [], "review_id": "r0", "highlight_spans": [[0, 36]], "annotator_id": "x"}]}"#,
        )?,
        parse_instance(
            r#"{"instance_id": "b__s", "split": "test", "origin": "Other",
                "reviews": [{"id": "r0", "text": "Breakfast was cold but the bed was huge."}],
                "summary": {"id": "s", "text": "A huge bed and a cold breakfast."},
                "alignments": [{"summary_sentence_index": 0, "summary_spans": [], "review_id": "r0", "highlight_spans": [[0, 39]], "annotator_id": "x"}]}"#,
        )?,
    ];
    // Entailment rewards sentences without the word "amazing"; containment
    // rewards longer passages.
    let scorer = FnScorer::new(|r: &ScorerRequest| {
        Ok(match r.kind {
            ScorerKind::Entailment => if r.hypothesis_or_query.contains("amazing") { 0.2 } else { 0.9 },
            _ => (r.premise_or_context.len() as f64 / 60.0).min(1.0),
        })
    });
    let systems = [
        ("terse", ["Great pool.", "Huge bed."]),
        ("balanced", ["The pool is great but the staff were rude.", "The bed was huge; breakfast came cold."]),
        ("hype", ["An amazing pool with amazing staff and amazing everything.", "An amazing bed and an amazing breakfast, truly."]),
    ];
    let dir = tempfile::tempdir().map_err(|e| fusebench::Error::io("tempdir", e))?;
    let board = Leaderboard::open(dir.path())?;
    for (system, passages) in systems {
        let lines: Vec<SubmissionLine> = instances
            .iter()
            .zip(passages)
            .map(|(i, p)| SubmissionLine { instance_id: i.instance_id.clone(), passage: p.to_string() })
            .collect();
        board.submit(system, &lines, &instances, &scorer, &EvalConfig::default(), false).await?;
    }
    println!("{}", board.render(None).render_text());

    let again = board.submit("terse", &[], &instances, &scorer, &EvalConfig::default(), false).await;
    println!("resubmitting without --replace: {}", again.unwrap_err());
    Ok(())
}
