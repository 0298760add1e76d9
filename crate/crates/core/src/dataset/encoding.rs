//! Model input encodings of an instance and the inverse markup decoder.

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::{FicInstance, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    /// Full reviews with each highlight span wrapped in markers.
    WithHighlights,
    /// Only the highlight texts, in document order.
    OnlyHighlights,
    /// Full reviews without markers.
    NoHighlights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub marker_open: String,
    pub marker_close: String,
    /// Line placed between consecutive reviews; `{k}` becomes the 1-based
    /// number of the review that follows.
    pub review_separator: String,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        EncodingConfig {
            marker_open: "<extra_token_1>".into(),
            marker_close: "<extra_token_2>".into(),
            review_separator: "||| review {k}".into(),
        }
    }
}

impl EncodingConfig {
    fn separator(&self, k: usize) -> String {
        format!("\n{}\n", self.review_separator.replace("{k}", &k.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedInput {
    pub mode: EncodingMode,
    pub text: String,
    pub marker_open: String,
    pub marker_close: String,
}

/// Character offset at which each review starts in the plain rendering.
pub fn review_offsets(instance: &FicInstance, config: &EncodingConfig) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(instance.review_set.reviews.len());
    let mut pos = 0;
    for (i, review) in instance.review_set.reviews.iter().enumerate() {
        if i > 0 {
            pos += config.separator(i + 1).chars().count();
        }
        offsets.push(pos);
        pos += review.char_len();
    }
    offsets
}

/// Highlight spans of `instance` mapped into the plain rendering, in order.
pub fn highlight_extents(instance: &FicInstance, config: &EncodingConfig) -> Vec<Span> {
    let offsets = review_offsets(instance, config);
    instance
        .highlight_spans_in_order()
        .into_iter()
        .map(|(pos, s)| Span::from((offsets[pos] + s.start, offsets[pos] + s.end)))
        .collect()
}

pub fn render_input(instance: &FicInstance, mode: EncodingMode, config: &EncodingConfig) -> Result<EncodedInput, DatasetError> {
    let text = match mode {
        EncodingMode::OnlyHighlights => instance.concatenated_highlights(),
        EncodingMode::NoHighlights | EncodingMode::WithHighlights => {
            let spans = instance.highlight_spans_in_order();
            let mut out = String::new();
            for (i, review) in instance.review_set.reviews.iter().enumerate() {
                if mode == EncodingMode::WithHighlights
                    && (review.text.contains(&config.marker_open) || review.text.contains(&config.marker_close))
                {
                    return Err(DatasetError::MarkerCollision(review.id.clone()));
                }
                if i > 0 {
                    out.push_str(&config.separator(i + 1));
                }
                if mode == EncodingMode::NoHighlights {
                    out.push_str(&review.text);
                    continue;
                }
                let mut cursor = 0;
                for (_, span) in spans.iter().filter(|(pos, _)| *pos == i) {
                    let before = review.slice(Span::from((cursor, span.start))).unwrap_or("");
                    let inner = review.slice(*span).ok_or_else(|| DatasetError::InvalidAlignment(format!("span {span:?} outside review `{}`", review.id)))?;
                    out.push_str(before);
                    out.push_str(&config.marker_open);
                    out.push_str(inner);
                    out.push_str(&config.marker_close);
                    cursor = span.end;
                }
                out.push_str(review.slice(Span::from((cursor, review.char_len()))).unwrap_or(""));
            }
            out
        }
    };
    Ok(EncodedInput { mode, text, marker_open: config.marker_open.clone(), marker_close: config.marker_close.clone() })
}

/// Text with markers removed and the marked spans, in character offsets of
/// the stripped text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedMarkup {
    pub text: String,
    pub spans: Vec<Span>,
}

pub fn decode_markup(encoded: &str, marker_open: &str, marker_close: &str) -> Result<DecodedMarkup, DatasetError> {
    let mut text = String::with_capacity(encoded.len());
    let mut spans = Vec::new();
    let mut open_at: Option<usize> = None;
    let mut chars = 0usize;
    let mut rest = encoded;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix(marker_open) {
            if open_at.is_some() {
                return Err(DatasetError::NestedMarkers { offset: chars });
            }
            open_at = Some(chars);
            rest = after;
        } else if let Some(after) = rest.strip_prefix(marker_close) {
            let start = open_at.take().ok_or(DatasetError::UnbalancedMarkers { offset: chars })?;
            if chars > start {
                spans.push(Span::from((start, chars)));
            }
            rest = after;
        } else {
            let c = rest.chars().next().expect("non-empty");
            text.push(c);
            chars += 1;
            rest = &rest[c.len_utf8()..];
        }
    }
    if let Some(start) = open_at {
        return Err(DatasetError::UnbalancedMarkers { offset: start });
    }
    Ok(DecodedMarkup { text, spans })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::interchange::parse_instance;

    fn instance() -> FicInstance {
        parse_instance(
            r#"{"instance_id": "a__b", "split": "dev", "origin": "Other",
                "reviews": [{"id": "r0", "text": "great pool"}, {"id": "r1", "text": "rude staff, nice bar"}],
                "summary": {"id": "b", "text": "Nice."},
                "alignments": [
                    {"summary_sentence_index": 0, "summary_spans": [], "review_id": "r0", "highlight_spans": [[6, 10]], "annotator_id": "w"},
                    {"summary_sentence_index": 0, "summary_spans": [], "review_id": "r1", "highlight_spans": [[12, 20], [0, 4]], "annotator_id": "w"}
                ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn single_review_markup() {
        let mut inst = instance();
        inst.review_set.reviews.truncate(1);
        inst.alignments.truncate(1);
        inst.highlights.truncate(1);
        let enc = render_input(&inst, EncodingMode::WithHighlights, &EncodingConfig::default()).unwrap();
        assert_eq!(enc.text, "great <extra_token_1>pool<extra_token_2>");
    }

    #[test]
    fn modes() {
        let inst = instance();
        let cfg = EncodingConfig::default();
        let only = render_input(&inst, EncodingMode::OnlyHighlights, &cfg).unwrap();
        assert_eq!(only.text, "pool rude nice bar");
        let plain = render_input(&inst, EncodingMode::NoHighlights, &cfg).unwrap();
        assert_eq!(plain.text, "great pool\n||| review 2\nrude staff, nice bar");
        let marked = render_input(&inst, EncodingMode::WithHighlights, &cfg).unwrap();
        assert_eq!(
            marked.text,
            "great <extra_token_1>pool<extra_token_2>\n||| review 2\n<extra_token_1>rude<extra_token_2> staff, <extra_token_1>nice bar<extra_token_2>"
        );
        let decoded = decode_markup(&marked.text, &cfg.marker_open, &cfg.marker_close).unwrap();
        assert_eq!(decoded.text, plain.text);
        assert_eq!(decoded.spans, highlight_extents(&inst, &cfg));
    }

    #[test]
    fn empty_highlights_have_no_markers() {
        let mut inst = instance();
        inst.alignments.clear();
        inst.highlights.clear();
        let enc = render_input(&inst, EncodingMode::WithHighlights, &EncodingConfig::default()).unwrap();
        assert!(!enc.text.contains("extra_token"));
    }

    #[test]
    fn decode_errors_and_hand_fixture() {
        let (o, c) = ("<a>", "</a>");
        assert_eq!(
            decode_markup("x <a>yz</a> w <a>é</a>", o, c).unwrap(),
            DecodedMarkup { text: "x yz w é".into(), spans: vec![Span::from((2, 4)), Span::from((7, 8))] }
        );
        assert!(matches!(decode_markup("x <a>y", o, c), Err(DatasetError::UnbalancedMarkers { .. })));
        assert!(matches!(decode_markup("x </a>y", o, c), Err(DatasetError::UnbalancedMarkers { .. })));
        assert!(matches!(decode_markup("<a>x <a>y</a></a>", o, c), Err(DatasetError::NestedMarkers { .. })));
    }

    #[test]
    fn marker_collision() {
        let mut inst = instance();
        inst.review_set.reviews[0] = crate::corpus::Document::new("r0", "great <extra_token_1>");
        assert!(matches!(
            render_input(&inst, EncodingMode::WithHighlights, &EncodingConfig::default()),
            Err(DatasetError::MarkerCollision(_))
        ));
    }
}
