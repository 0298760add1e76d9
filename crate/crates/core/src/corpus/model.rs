use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::span::{merge_spans, CharIndex, Span};
use super::text::{normalize, split_sentences, tokenize, Token};

/// A segmented text: a review, a summary or a system output.
///
/// Text is NFC-normalized on construction and segmentation is derived from
/// it; only `id` and `text` are serialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "RawDocument", into = "RawDocument")]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Span>,
    index: CharIndex,
}

pub type Review = Document;
pub type Summary = Document;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl From<RawDocument> for Document {
    fn from(raw: RawDocument) -> Self {
        Document::new(raw.id, &raw.text)
    }
}

impl From<Document> for RawDocument {
    fn from(doc: Document) -> Self {
        RawDocument { id: doc.id, text: doc.text }
    }
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.text == other.text
    }
}

impl Eq for Document {}

impl Document {
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        let text = normalize(text);
        let tokens = tokenize(&text);
        let sentences = split_sentences(&text);
        let index = CharIndex::new(&text);
        Document { id: id.into(), text, tokens, sentences, index }
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.index.char_len()
    }

    pub fn slice(&self, span: Span) -> Option<&str> {
        self.index.slice(&self.text, span)
    }

    pub fn sentence_text(&self, index: usize) -> Option<&str> {
        self.sentences.get(index).and_then(|s| self.slice(*s))
    }

    /// Indices of tokens whose span intersects `span`.
    pub fn tokens_in(&self, span: Span) -> impl Iterator<Item = usize> + '_ {
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.span.intersects(&span))
            .map(|(i, _)| i)
    }

    /// Index of the sentence containing the character at `offset`.
    pub fn sentence_of(&self, offset: usize) -> Option<usize> {
        self.sentences.iter().position(|s| s.start <= offset && offset < s.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    #[serde(alias = "cocotrip")]
    CocoTrip,
    #[serde(alias = "fewsum")]
    FewSum,
    #[serde(alias = "other")]
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewSet {
    pub id: String,
    pub reviews: Vec<Review>,
    pub origin: Origin,
}

impl ReviewSet {
    pub fn review(&self, id: &str) -> Option<&Review> {
        self.reviews.iter().find(|r| r.id == id)
    }

    pub fn review_position(&self, id: &str) -> Option<usize> {
        self.reviews.iter().position(|r| r.id == id)
    }
}

/// Possibly non-contiguous spans within a single review.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Highlight {
    pub review_id: String,
    pub spans: Vec<Span>,
}

impl Highlight {
    /// Span texts joined with single spaces.
    pub fn text(&self, review: &Review) -> String {
        self.spans.iter().filter_map(|s| review.slice(*s)).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub summary_sentence_index: usize,
    pub summary_spans: Vec<Span>,
    pub highlight: Highlight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect_label: Option<String>,
    pub annotator_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FicInstance {
    pub instance_id: String,
    pub review_set: ReviewSet,
    pub highlights: Vec<Highlight>,
    pub fused_text: Summary,
    pub alignments: Vec<Alignment>,
    pub split: Split,
}

impl FicInstance {
    /// Assembles an instance, deriving the highlight set from the alignments.
    pub fn new(
        instance_id: impl Into<String>,
        review_set: ReviewSet,
        fused_text: Summary,
        alignments: Vec<Alignment>,
        split: Split,
    ) -> Self {
        let highlights = merge_highlights(&review_set, &alignments)
            .into_iter()
            .map(|m| m.highlight)
            .collect();
        FicInstance { instance_id: instance_id.into(), review_set, highlights, fused_text, alignments, split }
    }

    pub fn review(&self, id: &str) -> Option<&Review> {
        self.review_set.review(id)
    }

    /// Highlights with the summary sentences each one is aligned to.
    pub fn merged_highlights(&self) -> Vec<MergedHighlight> {
        merge_highlights(&self.review_set, &self.alignments)
    }

    /// Every highlight span as `(review position, span)` in document order.
    pub fn highlight_spans_in_order(&self) -> Vec<(usize, Span)> {
        let mut out: Vec<(usize, Span)> = self
            .highlights
            .iter()
            .filter_map(|h| {
                let pos = self.review_set.review_position(&h.review_id)?;
                Some(h.spans.iter().map(move |s| (pos, *s)))
            })
            .flatten()
            .collect();
        out.sort();
        out
    }

    /// Highlight span texts in document order, joined with single spaces.
    pub fn concatenated_highlights(&self) -> String {
        self.highlight_spans_in_order()
            .into_iter()
            .filter_map(|(pos, span)| self.review_set.reviews[pos].slice(span))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A merged highlight and the summary sentences its alignments point at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedHighlight {
    pub highlight: Highlight,
    pub aligned_sentences: BTreeSet<usize>,
}

/// Unions alignment highlights into the instance highlight set.
///
/// Within each review, alignment highlights whose spans overlap or touch are
/// grouped transitively; each group becomes one highlight whose spans are the
/// merged union of the group's spans. Output is ordered by review position
/// in the set (unknown reviews last, by id), then by first span.
pub fn merge_highlights(review_set: &ReviewSet, alignments: &[Alignment]) -> Vec<MergedHighlight> {
    let mut by_review: HashMap<&str, Vec<&Alignment>> = HashMap::new();
    for alignment in alignments {
        if alignment.highlight.spans.iter().all(Span::is_empty) {
            continue;
        }
        by_review.entry(alignment.highlight.review_id.as_str()).or_default().push(alignment);
    }
    let mut review_ids: Vec<&str> = by_review.keys().copied().collect();
    review_ids.sort_by_key(|id| (review_set.review_position(id).unwrap_or(usize::MAX), *id));

    let mut out = Vec::new();
    for review_id in review_ids {
        let group = &by_review[review_id];
        let mut parent: Vec<usize> = (0..group.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in 0..group.len() {
            for b in (a + 1)..group.len() {
                let touching = group[a]
                    .highlight
                    .spans
                    .iter()
                    .any(|sa| group[b].highlight.spans.iter().any(|sb| sa.touches(sb)));
                if touching {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut components: HashMap<usize, (Vec<Span>, BTreeSet<usize>)> = HashMap::new();
        for (i, alignment) in group.iter().enumerate() {
            let root = find(&mut parent, i);
            let entry = components.entry(root).or_default();
            entry.0.extend(alignment.highlight.spans.iter().copied());
            entry.1.insert(alignment.summary_sentence_index);
        }
        let mut merged: Vec<MergedHighlight> = components
            .into_values()
            .map(|(spans, sentences)| MergedHighlight {
                highlight: Highlight { review_id: review_id.to_string(), spans: merge_spans(spans) },
                aligned_sentences: sentences,
            })
            .collect();
        merged.sort_by_key(|m| m.highlight.spans.first().copied());
        out.extend(merged);
    }
    out
}

/// A generated passage to be scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawSystemOutput", into = "RawSystemOutput")]
pub struct SystemOutput {
    pub instance_id: String,
    pub system_id: String,
    pub passage: String,
    pub sentences: Vec<Span>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSystemOutput {
    pub instance_id: String,
    pub system_id: String,
    pub passage: String,
}

impl From<RawSystemOutput> for SystemOutput {
    fn from(raw: RawSystemOutput) -> Self {
        SystemOutput::new(raw.instance_id, raw.system_id, &raw.passage)
    }
}

impl From<SystemOutput> for RawSystemOutput {
    fn from(out: SystemOutput) -> Self {
        RawSystemOutput { instance_id: out.instance_id, system_id: out.system_id, passage: out.passage }
    }
}

impl SystemOutput {
    pub fn new(instance_id: impl Into<String>, system_id: impl Into<String>, passage: &str) -> Self {
        let passage = normalize(passage);
        let sentences = split_sentences(&passage);
        SystemOutput { instance_id: instance_id.into(), system_id: system_id.into(), passage, sentences }
    }

    pub fn sentence_texts(&self) -> Vec<&str> {
        let index = CharIndex::new(&self.passage);
        self.sentences.iter().filter_map(|s| index.slice(&self.passage, *s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> ReviewSet {
        ReviewSet {
            id: "rs".into(),
            reviews: vec![Document::new("r0", "The pool was great and the staff friendly."), Document::new("r1", "Rooms were clean.")],
            origin: Origin::CocoTrip,
        }
    }

    fn alignment(sentence: usize, review: &str, spans: &[(usize, usize)]) -> Alignment {
        Alignment {
            summary_sentence_index: sentence,
            summary_spans: vec![],
            highlight: Highlight { review_id: review.into(), spans: spans.iter().map(|&s| s.into()).collect() },
            aspect_label: None,
            annotator_id: "w".into(),
        }
    }

    #[test]
    fn overlapping_alignment_highlights_merge() {
        let merged = merge_highlights(&set(), &[alignment(0, "r0", &[(3, 10)]), alignment(1, "r0", &[(7, 15)])]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].highlight.spans, vec![Span::from((3, 15))]);
        assert_eq!(merged[0].aligned_sentences, BTreeSet::from([0, 1]));
    }

    #[test]
    fn disjoint_highlights_stay_separate_and_ordered() {
        let merged = merge_highlights(
            &set(),
            &[alignment(0, "r1", &[(0, 5)]), alignment(0, "r0", &[(20, 25)]), alignment(1, "r0", &[(0, 3), (30, 35)])],
        );
        let got: Vec<(&str, Vec<Span>)> = merged.iter().map(|m| (m.highlight.review_id.as_str(), m.highlight.spans.clone())).collect();
        assert_eq!(
            got,
            vec![
                ("r0", vec![Span::from((0, 3)), Span::from((30, 35))]),
                ("r0", vec![Span::from((20, 25))]),
                ("r1", vec![Span::from((0, 5))]),
            ]
        );
    }

    #[test]
    fn duplicate_alignments_collapse() {
        let a = alignment(0, "r0", &[(4, 8)]);
        let merged = merge_highlights(&set(), &[a.clone(), a]);
        assert_eq!(merged.len(), 1);
    }

    #[test]
    fn document_round_trips_through_json() {
        let doc = Document::new("d", "Cafe\u{301} open. Nice.");
        assert_eq!(doc.text, "Café open. Nice.");
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"id":"d","text":"Café open. Nice."}"#);
        let back: Document = serde_json::from_str(&json).unwrap();
        assert_eq!(back.sentences, doc.sentences);
        assert_eq!(back.tokens, doc.tokens);
    }

    #[test]
    fn concatenated_highlights_follow_document_order() {
        let rs = set();
        let inst = FicInstance::new(
            "i",
            rs,
            Document::new("s", "Clean rooms. Great pool."),
            vec![alignment(1, "r1", &[(0, 5)]), alignment(0, "r0", &[(4, 8)])],
            Split::Train,
        );
        assert_eq!(inst.concatenated_highlights(), "pool Rooms");
    }
}
