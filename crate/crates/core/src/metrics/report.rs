use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::f1::{harmonic_mean, round1};
use super::lexical::{lexical_tokens, meteor_lite, rouge_l, rouge_n, MetricScore};
use super::nli::{coverage_score, faithfulness_score, trained_faithfulness_score, CoverageMode, FaithfulnessMode};
use super::MetricError;
use crate::corpus::{FicInstance, SystemOutput};
use crate::gateway::Scorer;
use crate::table::TextTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexicalMetric {
    Rouge1,
    Rouge2,
    RougeL,
    MeteorLite,
}

impl LexicalMetric {
    pub const ALL: [LexicalMetric; 4] = [LexicalMetric::Rouge1, LexicalMetric::Rouge2, LexicalMetric::RougeL, LexicalMetric::MeteorLite];

    pub fn name(self) -> &'static str {
        match self {
            LexicalMetric::Rouge1 => "rouge1",
            LexicalMetric::Rouge2 => "rouge2",
            LexicalMetric::RougeL => "rougeL",
            LexicalMetric::MeteorLite => "meteor_lite",
        }
    }

    pub fn compute(self, reference: &[String], candidate: &[String]) -> MetricScore {
        match self {
            LexicalMetric::Rouge1 => rouge_n(reference, candidate, 1),
            LexicalMetric::Rouge2 => rouge_n(reference, candidate, 2),
            LexicalMetric::RougeL => rouge_l(reference, candidate),
            LexicalMetric::MeteorLite => meteor_lite(reference, candidate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub faithfulness_mode: FaithfulnessMode,
    pub coverage_mode: CoverageMode,
    pub lexical: Vec<LexicalMetric>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            faithfulness_mode: FaithfulnessMode::Nli,
            coverage_mode: CoverageMode::Trained,
            lexical: LexicalMetric::ALL.to_vec(),
        }
    }
}

/// Scores of one system output. Fractions are in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub instance_id: String,
    pub system_id: String,
    pub faithfulness: f64,
    pub coverage: f64,
    pub f1: f64,
    pub lexical: BTreeMap<String, MetricScore>,
    pub per_sentence_faithfulness: Vec<f64>,
    pub per_highlight_coverage: Vec<f64>,
}

impl ScoreReport {
    /// `(faithfulness, coverage, f1)` on the 0-100 scale, rounded to one decimal.
    pub fn display_scores(&self) -> (f64, f64, f64) {
        (round1(self.faithfulness * 100.0), round1(self.coverage * 100.0), round1(self.f1 * 100.0))
    }
}

/// Runs every configured metric on one output.
///
/// Lexical metrics compare the output with the concatenated highlights.
pub async fn evaluate_output(
    instance: &FicInstance,
    output: &SystemOutput,
    scorer: &dyn Scorer,
    config: &EvalConfig,
) -> Result<ScoreReport, MetricError> {
    if instance.instance_id != output.instance_id {
        return Err(MetricError::InstanceMismatch(format!(
            "output for `{}` evaluated against instance `{}`",
            output.instance_id, instance.instance_id
        )));
    }
    let faithfulness = async {
        match config.faithfulness_mode {
            FaithfulnessMode::Nli => faithfulness_score(output, instance, scorer).await,
            FaithfulnessMode::Trained => trained_faithfulness_score(output, instance, scorer).await,
        }
        .map_err(|e| e.tagged("faithfulness"))
    };
    let coverage = async {
        coverage_score(&output.passage, instance, scorer, config.coverage_mode)
            .await
            .map_err(|e| e.tagged("coverage"))
    };
    let (faithfulness, coverage) = futures::join!(faithfulness, coverage);
    let (faithfulness, coverage) = (faithfulness?, coverage?);

    let reference = lexical_tokens(&instance.concatenated_highlights());
    let candidate = lexical_tokens(&output.passage);
    let lexical = config
        .lexical
        .iter()
        .map(|m| (m.name().to_string(), m.compute(&reference, &candidate)))
        .collect();

    Ok(ScoreReport {
        instance_id: output.instance_id.clone(),
        system_id: output.system_id.clone(),
        f1: harmonic_mean(faithfulness.overall, coverage.overall),
        faithfulness: faithfulness.overall,
        coverage: coverage.overall,
        lexical,
        per_sentence_faithfulness: faithfulness.per_unit,
        per_highlight_coverage: coverage.per_unit,
    })
}

/// Evaluates each output against the instance with the same id, preserving
/// output order. Fails on the first output without an instance or whose
/// scoring fails.
pub async fn evaluate_outputs(
    instances: &[FicInstance],
    outputs: &[SystemOutput],
    scorer: &dyn Scorer,
    config: &EvalConfig,
) -> Result<Vec<ScoreReport>, MetricError> {
    let by_id: HashMap<&str, &FicInstance> = instances.iter().map(|i| (i.instance_id.as_str(), i)).collect();
    let mut reports = Vec::with_capacity(outputs.len());
    for output in outputs {
        let instance = by_id.get(output.instance_id.as_str()).ok_or_else(|| {
            MetricError::InstanceMismatch(format!("no instance `{}` for system `{}`", output.instance_id, output.system_id))
        })?;
        reports.push(evaluate_output(instance, output, scorer, config).await?);
    }
    Ok(reports)
}

/// Faithfulness / Coverage / F-1 table, one row per `(label, report-like scores)`.
/// Scores are fractions; they are shown on the 0-100 scale.
pub fn render_results_table(rows: &[(String, f64, f64, f64)]) -> String {
    let mut table = TextTable::new(["Model", "Faithfulness", "Coverage", "F-1"]);
    for (label, faith, cov, f1) in rows {
        table.push([
            label.clone(),
            format!("{:.1}", round1(faith * 100.0)),
            format!("{:.1}", round1(cov * 100.0)),
            format!("{:.1}", round1(f1 * 100.0)),
        ]);
    }
    table.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::interchange::parse_instance;
    use crate::gateway::{FnScorer, GatewayError, MockScorer, ScorerKind, ScorerRequest};

    fn instance() -> FicInstance {
        parse_instance(
            r#"{"instance_id": "h__s", "split": "test", "origin": "CocoTrip",
                "reviews": [{"id": "r0", "text": "The pool was great. Rooms were clean."}, {"id": "r1", "text": "Staff was rude at times."}],
                "summary": {"id": "s", "text": "Great pool and clean rooms. Staff rude."},
                "alignments": [
                  {"summary_sentence_index": 0, "summary_spans": [[0, 10]], "review_id": "r0", "highlight_spans": [[4, 18]], "annotator_id": "w"},
                  {"summary_sentence_index": 0, "summary_spans": [[15, 26]], "review_id": "r0", "highlight_spans": [[18, 36]], "annotator_id": "w"},
                  {"summary_sentence_index": 1, "summary_spans": [[28, 39]], "review_id": "r1", "highlight_spans": [[0, 14]], "annotator_id": "w"}
                ]}"#,
        )
        .unwrap()
    }

    fn output(passage: &str) -> SystemOutput {
        SystemOutput::new("h__s", "sys", passage)
    }

    #[tokio::test]
    async fn faithfulness_means_sentence_scores() {
        let inst = instance();
        let out = output("The pool was great. Staff were rude.");
        let premise = inst.concatenated_highlights();
        let mock = MockScorer::constant(0.0)
            .script(ScorerKind::Entailment, &premise, "The pool was great.", 1.0)
            .script(ScorerKind::Entailment, &premise, "Staff were rude.", 0.5);
        let s = faithfulness_score(&out, &inst, &mock).await.unwrap();
        assert_eq!(s.per_unit, vec![1.0, 0.5]);
        assert_eq!(s.overall, 0.75);

        let three = output("A one. B two. C three.");
        let mock = FnScorer::new(|r: &ScorerRequest| Ok([0.2, 0.4, 0.9][r.request_id.rsplit(':').next().unwrap().parse::<usize>().unwrap()]));
        let s = faithfulness_score(&three, &inst, &mock).await.unwrap();
        assert!((s.overall - 0.5).abs() < 1e-12);
    }

    #[tokio::test]
    async fn faithfulness_variants_share_aggregation() {
        let inst = instance();
        let out = output("One. Two.");
        let mock = MockScorer::constant(0.0)
            .with_kind_default(ScorerKind::Entailment, 0.7)
            .with_kind_default(ScorerKind::Containment, 0.7);
        let a = faithfulness_score(&out, &inst, &mock).await.unwrap();
        let b = trained_faithfulness_score(&out, &inst, &mock).await.unwrap();
        assert_eq!(a, b);
    }

    #[tokio::test]
    async fn coverage_modes_use_their_roles() {
        let inst = instance();
        assert_eq!(inst.highlights.len(), 2);
        let passage = "The pool was great.";
        let seen = std::sync::Mutex::new(Vec::new());
        let mock = FnScorer::new(|r: &ScorerRequest| {
            seen.lock().unwrap().push((r.kind, r.premise_or_context.clone(), r.hypothesis_or_query.clone()));
            Ok(if r.hypothesis_or_query.starts_with("pool") { 0.9 } else { 0.7 })
        });
        let s = coverage_score(passage, &inst, &mock, CoverageMode::Trained).await.unwrap();
        assert!((s.overall - 0.8).abs() < 1e-12);
        let calls = seen.lock().unwrap().clone();
        assert_eq!(calls.len(), 2);
        assert!(calls.iter().all(|(k, p, _)| *k == ScorerKind::Containment && p == passage));
        assert_eq!(calls[0].2, "pool was great. Rooms were clean");
        seen.lock().unwrap().clear();
        coverage_score(passage, &inst, &mock, CoverageMode::Nli).await.unwrap();
        assert!(seen.lock().unwrap().iter().all(|(k, p, _)| *k == ScorerKind::Entailment && p == passage));
    }

    #[tokio::test]
    async fn gateway_errors_carry_unit_index() {
        let inst = instance();
        let out = output("Fine. Broken here.");
        let mock = FnScorer::new(|r: &ScorerRequest| {
            if r.hypothesis_or_query.starts_with("Broken") {
                Err(GatewayError::Timeout { request_id: r.request_id.clone() })
            } else {
                Ok(1.0)
            }
        });
        let err = faithfulness_score(&out, &inst, &mock).await.unwrap_err();
        assert!(matches!(err, MetricError::Gateway { index: 1, .. }));
        let err = evaluate_output(&inst, &out, &mock, &EvalConfig::default()).await.unwrap_err();
        assert!(matches!(err, MetricError::Tagged { metric: "faithfulness", .. }));
    }

    #[tokio::test]
    async fn empty_highlights_rejected() {
        let mut inst = instance();
        inst.alignments.clear();
        inst.highlights.clear();
        let mock = MockScorer::constant(1.0);
        assert!(matches!(faithfulness_score(&output("x."), &inst, &mock).await, Err(MetricError::EmptyHighlights(_))));
        assert!(matches!(coverage_score("x.", &inst, &mock, CoverageMode::Trained).await, Err(MetricError::EmptyHighlights(_))));
    }

    #[tokio::test]
    async fn evaluate_with_perfect_mock() {
        let inst = instance();
        let out = output(&inst.concatenated_highlights());
        let report = evaluate_output(&inst, &out, &MockScorer::constant(1.0), &EvalConfig::default()).await.unwrap();
        assert_eq!(report.display_scores(), (100.0, 100.0, 100.0));
        let r1 = &report.lexical["rouge1"];
        assert_eq!((r1.recall, r1.precision), (Some(1.0), Some(1.0)));
    }

    #[tokio::test]
    async fn evaluate_reports_f1_of_reported_values() {
        let inst = instance();
        let mock = MockScorer::constant(0.0)
            .with_kind_default(ScorerKind::Entailment, 0.728)
            .with_kind_default(ScorerKind::Containment, 0.864);
        let report = evaluate_output(&inst, &output("Some text. More."), &mock, &EvalConfig::default()).await.unwrap();
        assert_eq!(report.display_scores(), (72.8, 86.4, 79.0));
        let mean = report.per_sentence_faithfulness.iter().sum::<f64>() / report.per_sentence_faithfulness.len() as f64;
        assert_eq!(report.faithfulness, mean);
    }

    #[tokio::test]
    async fn mismatched_ids() {
        let inst = instance();
        let out = SystemOutput::new("other", "sys", "Text.");
        let err = evaluate_output(&inst, &out, &MockScorer::constant(1.0), &EvalConfig::default()).await.unwrap_err();
        assert!(matches!(err, MetricError::InstanceMismatch(_)));
    }

    #[test]
    fn results_table_layout() {
        let text = render_results_table(&[("sys".into(), 0.728, 0.864, harmonic_mean(0.728, 0.864))]);
        assert!(text.starts_with("Model  Faithfulness  Coverage   F-1\n"));
        assert!(text.contains("sys            72.8      86.4  79.0"));
    }
}
