use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{Alignment, Document, Highlight, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionStatus {
    Open,
    Submitted,
    Reviewed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedAlignment {
    pub alignment_id: u64,
    pub alignment: Alignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionReview {
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub session_id: String,
    pub worker_id: String,
    pub review_set_id: String,
    pub summary_id: String,
    pub current_review_index: usize,
    pub focused_sentence_index: usize,
    pub saved_alignments: Vec<SavedAlignment>,
    pub status: SessionStatus,
    /// Set once `NextReview` is issued on the last review.
    #[serde(default)]
    pub ready_to_submit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review: Option<SessionReview>,
}

impl AnnotationSession {
    /// Summary sentences with no saved alignment, given the sentence count.
    pub fn unaligned_sentences(&self, sentence_count: usize) -> Vec<usize> {
        let aligned: BTreeSet<usize> = self.saved_alignments.iter().map(|a| a.alignment.summary_sentence_index).collect();
        (0..sentence_count).filter(|i| !aligned.contains(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    NextAspect,
    NextSentence,
    NextReview,
}

/// Alignment as posted by the annotation client; the annotator is the
/// session's worker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentDraft {
    pub summary_sentence_index: usize,
    #[serde(default)]
    pub summary_spans: Vec<Span>,
    pub review_id: String,
    pub highlight_spans: Vec<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect_label: Option<String>,
}

impl AlignmentDraft {
    pub fn into_alignment(mut self, annotator_id: &str) -> Alignment {
        self.highlight_spans.sort();
        self.summary_spans.sort();
        Alignment {
            summary_sentence_index: self.summary_sentence_index,
            summary_spans: self.summary_spans,
            highlight: Highlight { review_id: self.review_id, spans: self.highlight_spans },
            aspect_label: self.aspect_label,
            annotator_id: annotator_id.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaveStatus {
    Saved,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaveOutcome {
    pub status: SaveStatus,
    pub alignment_id: u64,
    pub session: AnnotationSession,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionReceipt {
    pub session_id: String,
    pub alignment_count: usize,
    /// Summary sentences left without any alignment, for the reviewer.
    pub unaligned_sentences: Vec<usize>,
}

/// Indices of review content-word tokens sharing a stem with a content word
/// of summary sentence `sentence`.
pub fn embolden(summary: &Document, sentence: usize, review: &Document) -> Option<Vec<usize>> {
    let span = *summary.sentences.get(sentence)?;
    let stems: BTreeSet<&str> = summary
        .tokens
        .iter()
        .filter(|t| t.is_content_word && span.contains_span(&t.span))
        .map(|t| t.stem.as_str())
        .collect();
    Some(
        review
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_content_word && stems.contains(t.stem.as_str()))
            .map(|(i, _)| i)
            .collect(),
    )
}
