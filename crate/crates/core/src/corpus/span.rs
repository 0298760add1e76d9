use serde::{Deserialize, Serialize};

/// A half-open character range `[start, end)`.
///
/// Serialized as a two-element array `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(span: Span) -> Self {
        (span.start, span.end)
    }
}

impl Span {
    /// Builds a span, checking `start < end <= text_len`.
    pub fn new(start: usize, end: usize, text_len: usize) -> Option<Span> {
        (start < end && end <= text_len).then_some(Span { start, end })
    }

    pub(crate) fn new_unchecked(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn is_valid_for(&self, text_len: usize) -> bool {
        self.start < self.end && self.end <= text_len
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// True when the spans overlap or share an endpoint.
    pub fn touches(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Sorts spans and unions every pair that overlaps or touches.
pub fn merge_spans(spans: impl IntoIterator<Item = Span>) -> Vec<Span> {
    let mut spans: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
    spans.sort();
    let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
    for span in spans {
        match merged.last_mut() {
            Some(last) if span.start <= last.end => last.end = last.end.max(span.end),
            _ => merged.push(span),
        }
    }
    merged
}

/// Character-offset view over a string, for slicing by code point.
#[derive(Debug, Clone)]
pub struct CharIndex {
    byte_offsets: Vec<usize>,
}

impl CharIndex {
    pub fn new(text: &str) -> Self {
        let mut byte_offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_offsets.push(text.len());
        CharIndex { byte_offsets }
    }

    /// Number of characters in the indexed text.
    pub fn char_len(&self) -> usize {
        self.byte_offsets.len() - 1
    }

    pub fn byte_offset(&self, char_offset: usize) -> Option<usize> {
        self.byte_offsets.get(char_offset).copied()
    }

    pub fn char_offset(&self, byte_offset: usize) -> Option<usize> {
        self.byte_offsets.binary_search(&byte_offset).ok()
    }

    pub fn slice<'t>(&self, text: &'t str, span: Span) -> Option<&'t str> {
        if span.start > span.end {
            return None;
        }
        let start = self.byte_offset(span.start)?;
        let end = self.byte_offset(span.end)?;
        text.get(start..end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merges_overlapping_and_touching() {
        let merged = merge_spans([Span::from((7, 15)), Span::from((3, 10)), Span::from((15, 18)), Span::from((20, 22))]);
        assert_eq!(merged, vec![Span::from((3, 18)), Span::from((20, 22))]);
    }

    #[test]
    fn slices_by_character() {
        let text = "naïve café";
        let index = CharIndex::new(text);
        assert_eq!(index.char_len(), 10);
        assert_eq!(index.slice(text, Span::from((6, 10))), Some("café"));
        assert_eq!(index.slice(text, Span::from((6, 11))), None);
    }

    #[test]
    fn serializes_as_pair() {
        let json = serde_json::to_string(&Span::from((3, 9))).unwrap();
        assert_eq!(json, "[3,9]");
        let back: Span = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Span::from((3, 9)));
    }

    proptest! {
        #[test]
        fn merged_spans_are_disjoint_and_cover_input(raw in proptest::collection::vec((0usize..50, 1usize..10), 0..12)) {
            let spans: Vec<Span> = raw.iter().map(|&(s, l)| Span::from((s, s + l))).collect();
            let merged = merge_spans(spans.clone());
            for pair in merged.windows(2) {
                prop_assert!(pair[0].end < pair[1].start);
            }
            for s in &spans {
                prop_assert!(merged.iter().any(|m| m.contains_span(s)));
            }
            let covered: usize = merged.iter().map(Span::len).sum();
            let mut points = std::collections::BTreeSet::new();
            for s in &spans { points.extend(s.start..s.end); }
            prop_assert_eq!(covered, points.len());
        }
    }
}
