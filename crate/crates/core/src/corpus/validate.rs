use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::model::{merge_highlights, Alignment, FicInstance, Highlight, Review, Summary};
use super::span::Span;

/// One broken structural rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.field, self.rule, self.detail)
    }
}

pub mod rules {
    pub const UNIQUE_REVIEW_IDS: &str = "review ids unique within set";
    pub const HIGHLIGHT_BOUNDS: &str = "highlight span within review bounds";
    pub const HIGHLIGHT_ORDER: &str = "highlight spans sorted and non-overlapping";
    pub const HIGHLIGHT_REVIEW: &str = "highlight references a review of the set";
    pub const HIGHLIGHT_NON_EMPTY: &str = "alignment highlight non-empty";
    pub const SENTENCE_INDEX: &str = "alignment sentence index within summary";
    pub const SUMMARY_SPAN: &str = "summary spans within the indexed sentence";
    pub const HIGHLIGHT_UNION: &str = "highlights equal merged union of alignment highlights";
    pub const FUSED_NON_EMPTY: &str = "fused text non-empty";
}

fn check_highlight(field: &str, highlight: &Highlight, review: Option<&Review>, out: &mut Vec<Violation>) {
    let Some(review) = review else {
        out.push(Violation {
            field: format!("{field}.review_id"),
            rule: rules::HIGHLIGHT_REVIEW,
            detail: format!("unknown review `{}`", highlight.review_id),
        });
        return;
    };
    let len = review.char_len();
    for (i, span) in highlight.spans.iter().enumerate() {
        if !span.is_valid_for(len) {
            out.push(Violation {
                field: format!("{field}.spans[{i}]"),
                rule: rules::HIGHLIGHT_BOUNDS,
                detail: format!("span ({}, {}) in review `{}` of length {len}", span.start, span.end, review.id),
            });
        }
    }
    for (i, pair) in highlight.spans.windows(2).enumerate() {
        if pair[1].start < pair[0].end {
            out.push(Violation {
                field: format!("{field}.spans[{}]", i + 1),
                rule: rules::HIGHLIGHT_ORDER,
                detail: format!("({}, {}) follows ({}, {})", pair[1].start, pair[1].end, pair[0].start, pair[0].end),
            });
        }
    }
}

/// Checks an alignment against the summary and review it refers to.
pub fn validate_alignment(alignment: &Alignment, summary: &Summary, review: Option<&Review>, field: &str) -> Vec<Violation> {
    let mut out = Vec::new();
    if alignment.highlight.spans.is_empty() {
        out.push(Violation {
            field: format!("{field}.highlight"),
            rule: rules::HIGHLIGHT_NON_EMPTY,
            detail: "no spans".into(),
        });
    }
    check_highlight(&format!("{field}.highlight"), &alignment.highlight, review, &mut out);
    match summary.sentences.get(alignment.summary_sentence_index) {
        None => out.push(Violation {
            field: format!("{field}.summary_sentence_index"),
            rule: rules::SENTENCE_INDEX,
            detail: format!(
                "index {} but summary has {} sentences",
                alignment.summary_sentence_index,
                summary.sentences.len()
            ),
        }),
        Some(sentence) => {
            for (i, span) in alignment.summary_spans.iter().enumerate() {
                if span.is_empty() || !sentence.contains_span(span) {
                    out.push(Violation {
                        field: format!("{field}.summary_spans[{i}]"),
                        rule: rules::SUMMARY_SPAN,
                        detail: format!("({}, {}) outside sentence ({}, {})", span.start, span.end, sentence.start, sentence.end),
                    });
                }
            }
        }
    }
    out
}

/// Structural checks on an instance. An empty report means every invariant holds.
pub fn validate_instance(instance: &FicInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for review in &instance.review_set.reviews {
        if !seen.insert(review.id.as_str()) {
            out.push(Violation {
                field: "review_set.reviews".into(),
                rule: rules::UNIQUE_REVIEW_IDS,
                detail: format!("duplicate id `{}`", review.id),
            });
        }
    }
    if instance.fused_text.text.trim().is_empty() {
        out.push(Violation { field: "fused_text".into(), rule: rules::FUSED_NON_EMPTY, detail: "empty".into() });
    }
    for (i, highlight) in instance.highlights.iter().enumerate() {
        check_highlight(&format!("highlights[{i}]"), highlight, instance.review(&highlight.review_id), &mut out);
    }
    for (i, alignment) in instance.alignments.iter().enumerate() {
        out.extend(validate_alignment(
            alignment,
            &instance.fused_text,
            instance.review(&alignment.highlight.review_id),
            &format!("alignments[{i}]"),
        ));
    }
    let expected: Vec<Highlight> =
        merge_highlights(&instance.review_set, &instance.alignments).into_iter().map(|m| m.highlight).collect();
    if expected != instance.highlights {
        out.push(Violation {
            field: "highlights".into(),
            rule: rules::HIGHLIGHT_UNION,
            detail: format!("expected {} merged highlights, found {}", expected.len(), instance.highlights.len()),
        });
    }
    out
}

/// True when every span of every highlight maps to a non-empty substring.
pub fn highlight_texts_non_empty(instance: &FicInstance) -> bool {
    instance.highlights.iter().all(|h| {
        instance
            .review(&h.review_id)
            .is_some_and(|r| h.spans.iter().all(|s: &Span| r.slice(*s).is_some_and(|t| !t.is_empty())))
    })
}
