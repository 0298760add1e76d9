//! JSON interchange format: one document per instance.
//!
//! Segmentation is never serialized; it is recomputed on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{Alignment, Document, FicInstance, Highlight, Origin, RawDocument, ReviewSet, Split};
use super::span::Span;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterchangeAlignment {
    pub summary_sentence_index: usize,
    pub summary_spans: Vec<Span>,
    pub review_id: String,
    pub highlight_spans: Vec<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect_label: Option<String>,
    pub annotator_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterchangeInstance {
    pub instance_id: String,
    pub split: Split,
    pub origin: Origin,
    /// Review-set id; defaults to the instance id's prefix when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review_set_id: Option<String>,
    pub reviews: Vec<RawDocument>,
    pub summary: RawDocument,
    #[serde(default)]
    pub alignments: Vec<InterchangeAlignment>,
}

impl From<&Alignment> for InterchangeAlignment {
    fn from(a: &Alignment) -> Self {
        InterchangeAlignment {
            summary_sentence_index: a.summary_sentence_index,
            summary_spans: a.summary_spans.clone(),
            review_id: a.highlight.review_id.clone(),
            highlight_spans: a.highlight.spans.clone(),
            aspect_label: a.aspect_label.clone(),
            annotator_id: a.annotator_id.clone(),
        }
    }
}

impl From<InterchangeAlignment> for Alignment {
    fn from(a: InterchangeAlignment) -> Self {
        Alignment {
            summary_sentence_index: a.summary_sentence_index,
            summary_spans: a.summary_spans,
            highlight: Highlight { review_id: a.review_id, spans: a.highlight_spans },
            aspect_label: a.aspect_label,
            annotator_id: a.annotator_id,
        }
    }
}

/// Review-set id used when a document does not carry one: the instance id up
/// to its last `__` separator, or the whole id.
pub fn default_review_set_id(instance_id: &str) -> &str {
    instance_id.rsplit_once("__").map_or(instance_id, |(head, _)| head)
}

/// Canonical instance id for a review-set/summary pair.
pub fn pair_instance_id(review_set_id: &str, summary_id: &str) -> String {
    format!("{review_set_id}__{summary_id}")
}

impl From<InterchangeInstance> for FicInstance {
    fn from(doc: InterchangeInstance) -> Self {
        let review_set_id = doc.review_set_id.unwrap_or_else(|| default_review_set_id(&doc.instance_id).to_string());
        let review_set = ReviewSet {
            id: review_set_id,
            reviews: doc.reviews.into_iter().map(Document::from).collect(),
            origin: doc.origin,
        };
        FicInstance::new(
            doc.instance_id,
            review_set,
            Document::from(doc.summary),
            doc.alignments.into_iter().map(Alignment::from).collect(),
            doc.split,
        )
    }
}

impl From<&FicInstance> for InterchangeInstance {
    fn from(inst: &FicInstance) -> Self {
        InterchangeInstance {
            instance_id: inst.instance_id.clone(),
            split: inst.split,
            origin: inst.review_set.origin,
            review_set_id: Some(inst.review_set.id.clone()),
            reviews: inst.review_set.reviews.iter().cloned().map(RawDocument::from).collect(),
            summary: inst.fused_text.clone().into(),
            alignments: inst.alignments.iter().map(InterchangeAlignment::from).collect(),
        }
    }
}

pub fn parse_instance(json: &str) -> Result<FicInstance> {
    let doc: InterchangeInstance = serde_json::from_str(json)?;
    Ok(doc.into())
}

pub fn to_json(instance: &FicInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InterchangeInstance::from(instance))?)
}

/// Loads instances from a directory of `*.json` files, or from a single
/// `.json` / `.jsonl` file. Results are sorted by instance id.
pub fn load_instances(path: &Path) -> Result<Vec<FicInstance>> {
    let mut instances = Vec::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        for file in files {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            instances.push(parse_instance(&text).map_err(|e| e.context(file.display().to_string()))?);
        }
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|ext| ext == "jsonl") {
            for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                instances.push(parse_instance(line).map_err(|e| e.context(format!("{}:{}", path.display(), n + 1)))?);
            }
        } else {
            instances.push(parse_instance(&text)?);
        }
    }
    instances.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    Ok(instances)
}

/// Writes one `<instance_id>.json` per instance into `dir`.
pub fn write_instances(dir: &Path, instances: &[FicInstance]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for inst in instances {
        let path = dir.join(format!("{}.json", inst.instance_id));
        fs::write(&path, to_json(inst)? + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "instance_id": "hotel7__s1",
        "split": "test",
        "origin": "CocoTrip",
        "reviews": [{"id": "r0", "text": "Great pool. Rooms were clean."}, {"id": "r1", "text": "Rude staff."}],
        "summary": {"id": "s1", "text": "The pool is great. Staff is rude."},
        "alignments": [
            {"summary_sentence_index": 0, "summary_spans": [[4, 8]], "review_id": "r0", "highlight_spans": [[6, 10]], "annotator_id": "w1", "aspect_label": "pool"},
            {"summary_sentence_index": 1, "summary_spans": [[19, 33]], "review_id": "r1", "highlight_spans": [[0, 10]], "annotator_id": "w1"}
        ]
    }"#;

    #[test]
    fn parses_and_recomputes_segmentation() {
        let inst = parse_instance(DOC).unwrap();
        assert_eq!(inst.review_set.id, "hotel7");
        assert_eq!(inst.split, Split::Test);
        assert_eq!(inst.fused_text.sentences.len(), 2);
        assert_eq!(inst.highlights.len(), 2);
        assert!(crate::corpus::validate_instance(&inst).is_empty());
    }

    #[test]
    fn serialization_round_trip_is_stable() {
        let inst = parse_instance(DOC).unwrap();
        let json = to_json(&inst).unwrap();
        let again = parse_instance(&json).unwrap();
        assert_eq!(inst, again);
        assert_eq!(json, to_json(&again).unwrap());
        assert!(!json.contains("tokens"));
    }

    #[test]
    fn directory_load_and_write() {
        let dir = tempfile::tempdir().unwrap();
        let inst = parse_instance(DOC).unwrap();
        write_instances(dir.path(), std::slice::from_ref(&inst)).unwrap();
        let loaded = load_instances(dir.path()).unwrap();
        assert_eq!(loaded, vec![inst]);
    }
}
