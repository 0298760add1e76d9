//! Data model for reviews, summaries, highlights and benchmark instances,
//! with the deterministic segmentation every other module relies on.

pub mod interchange;
mod model;
mod span;
mod text;
mod validate;

pub use model::{
    merge_highlights, Alignment, Document, FicInstance, Highlight, MergedHighlight, Origin, RawDocument,
    RawSystemOutput, Review, ReviewSet, Split, Summary, SystemOutput,
};
pub use span::{merge_spans, CharIndex, Span};
pub use text::{is_stopword, normalize, split_sentences, stem, tokenize, Token};
pub use validate::{highlight_texts_non_empty, rules, validate_alignment, validate_instance, Violation};
