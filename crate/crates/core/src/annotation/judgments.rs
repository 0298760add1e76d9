use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[serde(alias = "Faithfulness")]
    Faithfulness,
    #[serde(alias = "Coverage")]
    Coverage,
    #[serde(alias = "Coherence")]
    Coherence,
    #[serde(alias = "Redundancy")]
    Redundancy,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Faithfulness, Axis::Coverage, Axis::Coherence, Axis::Redundancy];

    /// Likert range: 7 points for faithfulness and coverage, 5 otherwise.
    pub fn range(self) -> RangeInclusive<i64> {
        match self {
            Axis::Faithfulness | Axis::Coverage => 1..=7,
            Axis::Coherence | Axis::Redundancy => 1..=5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Faithfulness => "faithfulness",
            Axis::Coverage => "coverage",
            Axis::Coherence => "coherence",
            Axis::Redundancy => "redundancy",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown axis `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputRef {
    pub instance_id: String,
    pub system_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub judge_id: String,
    pub output_ref: OutputRef,
    pub axis: Axis,
    pub score: i64,
}

impl JudgmentRecord {
    /// Stable id of the (judge, output, axis) triple; re-submissions reuse it.
    pub fn id(&self) -> String {
        format!("{}/{}/{}/{}", self.judge_id, self.output_ref.instance_id, self.output_ref.system_id, self.axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentAggregate {
    pub output_ref: OutputRef,
    pub axis: Axis,
    pub mean: f64,
    pub judges: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(Axis::Faithfulness.range().count(), 7);
        assert_eq!(Axis::Coverage.range().count(), 7);
        assert_eq!(Axis::Coherence.range().count(), 5);
        assert!(!Axis::Redundancy.range().contains(&6));
    }

    #[test]
    fn parse_and_serde() {
        assert_eq!("Coherence".parse::<Axis>().unwrap(), Axis::Coherence);
        assert_eq!(serde_json::from_str::<Axis>(r#""Coverage""#).unwrap(), Axis::Coverage);
        assert_eq!(serde_json::to_string(&Axis::Redundancy).unwrap(), r#""redundancy""#);
    }
}
