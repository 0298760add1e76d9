//! Deterministic tokenization, stemming and sentence splitting.
//!
//! All offsets are character (code point) offsets into the text they index.
//! Callers are expected to pass NFC-normalized text; see [`normalize`].

use std::collections::HashSet;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use unicode_normalization::UnicodeNormalization;

use super::span::Span;

/// A single token with its character span, stem and content-word flag.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Token {
    pub text: String,
    pub span: Span,
    pub is_content_word: bool,
    pub stem: String,
}

/// Function words excluded from emboldening and IoU agreement.
const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "even",
    "ever", "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its",
    "itself", "just", "let", "may", "me", "might", "more", "most", "must", "my", "myself", "no",
    "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
    "ourselves", "out", "over", "own", "same", "shall", "she", "should", "so", "some", "such",
    "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up", "upon", "us", "very",
    "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will",
    "with", "would", "yet", "you", "your", "yours", "yourself", "yourselves", "'s", "s", "t",
    "don't", "didn't", "doesn't", "isn't", "wasn't", "weren't", "aren't", "it's", "i'm", "i've",
    "we're", "they're", "you're", "there's", "that's", "can't", "won't", "couldn't", "wouldn't",
    "shouldn't", "hadn't", "hasn't", "haven't", "let's", "he's", "she's", "we've", "they've",
];

/// Abbreviations that never end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "ave.", "blvd.", "rd.",
    "vs.", "e.g.", "i.e.", "approx.", "no.", "inc.", "ltd.", "co.", "corp.", "jan.", "feb.",
    "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.", "nov.", "dec.", "u.s.",
    "a.m.", "p.m.",
];

/// Applies Unicode NFC normalization.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

pub fn is_stopword(lowercase: &str) -> bool {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.iter().copied().collect()).contains(lowercase)
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Lowercases and stems a single word. Non-word tokens are only lowercased.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    if lower.chars().any(char::is_alphanumeric) {
        stemmer().stem(&lower).into_owned()
    } else {
        lower
    }
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Class {
    Word,
    Space,
    Punct,
}

fn classify(c: char) -> Class {
    if c.is_alphanumeric() {
        Class::Word
    } else if c.is_whitespace() {
        Class::Space
    } else {
        Class::Punct
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits `text` into word and punctuation tokens.
///
/// Words are maximal alphanumeric runs; an apostrophe joins two alphanumeric
/// runs ("don't"). Any other run of non-space, non-alphanumeric characters is
/// a single punctuation token. Whitespace produces no token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let class = classify(chars[i]);
        if class == Class::Space {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        match class {
            Class::Word => loop {
                while i < chars.len() && classify(chars[i]) == Class::Word {
                    i += 1;
                }
                if i + 1 < chars.len()
                    && is_apostrophe(chars[i])
                    && classify(chars[i + 1]) == Class::Word
                {
                    i += 1;
                } else {
                    break;
                }
            },
            Class::Punct => {
                while i < chars.len() && classify(chars[i]) == Class::Punct {
                    i += 1;
                }
            }
            Class::Space => unreachable!(),
        }
        let token_text: String = chars[start..i].iter().collect();
        tokens.push(make_token(token_text, Span::new_unchecked(start, i)));
    }
    tokens
}

fn make_token(text: String, span: Span) -> Token {
    let lower = text.to_lowercase().replace('\u{2019}', "'");
    let has_letter = lower.chars().any(char::is_alphabetic);
    let is_content_word = has_letter && !is_stopword(&lower);
    let stem = stem(&lower);
    Token { text, span, is_content_word, stem }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}')
}

/// Whether the word ending at `dot` (inclusive) is a known abbreviation or a
/// single-letter initial.
fn is_abbreviation(chars: &[char], dot: usize) -> bool {
    let mut w = dot;
    while w > 0 && (chars[w - 1].is_alphabetic() || chars[w - 1] == '.') {
        w -= 1;
    }
    let word: String = chars[w..=dot].iter().collect::<String>().to_lowercase();
    if ABBREVIATIONS.contains(&word.as_str()) {
        return true;
    }
    // "J." style initials
    word.chars().count() == 2 && chars[w].is_uppercase()
}

/// Splits `text` into sentence spans.
///
/// A boundary falls after a run of `.`, `!` or `?` (plus closing quotes or
/// brackets) that is followed by whitespace and then an uppercase letter or a
/// digit, unless the period closes a known abbreviation. Each span runs from
/// its first to its last non-whitespace character.
pub fn split_sentences(text: &str) -> Vec<Span> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let Some(mut start) = chars.iter().position(|c| !c.is_whitespace()) else {
        return sentences;
    };
    let mut i = start;
    while i < chars.len() {
        if !is_terminal(chars[i]) {
            i += 1;
            continue;
        }
        let mark = i;
        let mut j = i + 1;
        while j < chars.len() && (is_terminal(chars[j]) || is_closer(chars[j])) {
            j += 1;
        }
        if j < chars.len() && chars[j].is_whitespace() {
            let mut k = j;
            while k < chars.len() && chars[k].is_whitespace() {
                k += 1;
            }
            let next_starts = k < chars.len() && (chars[k].is_uppercase() || chars[k].is_ascii_digit());
            let abbreviated = chars[mark] == '.' && j == mark + 1 && is_abbreviation(&chars, mark);
            if next_starts && !abbreviated {
                sentences.push(Span::new_unchecked(start, j));
                start = k;
                i = k;
                continue;
            }
        }
        i = j;
    }
    let end = chars.iter().rposition(|c| !c.is_whitespace()).map_or(start, |p| p + 1);
    if end > start {
        sentences.push(Span::new_unchecked(start, end));
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<(&str, usize, usize)> {
        tokens.iter().map(|t| (t.text.as_str(), t.span.start, t.span.end)).collect()
    }

    #[test]
    fn empty_text_has_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn word_and_punctuation_tokens() {
        let tokens = tokenize("Great pool!");
        assert_eq!(texts(&tokens), vec![("Great", 0, 5), ("pool", 6, 10), ("!", 10, 11)]);
        assert!(tokens[0].is_content_word);
        assert!(!tokens[2].is_content_word);
    }

    #[test]
    fn apostrophes_join_words() {
        let tokens = tokenize("don't 'quote' it's...");
        assert_eq!(
            texts(&tokens),
            vec![("don't", 0, 5), ("'", 6, 7), ("quote", 7, 12), ("'", 12, 13), ("it's", 14, 18), ("...", 18, 21)]
        );
    }

    #[test]
    fn frozen_stems() {
        // Values frozen from the stemmer before building on top of it.
        for (word, expected) in [
            ("rooms", "room"),
            ("Rooms", "room"),
            ("cleaned", "clean"),
            ("clean", "clean"),
            ("cleanliness", "cleanli"),
            ("staff", "staff"),
            ("friendly", "friend"),
            ("breakfast", "breakfast"),
            ("locations", "locat"),
            ("location", "locat"),
        ] {
            assert_eq!(stem(word), expected, "stem of {word}");
        }
    }

    #[test]
    fn stopwords_are_not_content_words() {
        let tokens = tokenize("The room was 42 great");
        let flags: Vec<bool> = tokens.iter().map(|t| t.is_content_word).collect();
        assert_eq!(flags, vec![false, true, false, false, true]);
    }

    #[test]
    fn non_ascii_offsets_are_characters() {
        let tokens = tokenize("café über");
        assert_eq!(texts(&tokens), vec![("café", 0, 4), ("über", 5, 9)]);
    }

    #[test]
    fn sentence_examples() {
        assert_eq!(split_sentences("Nice. Clean."), vec![Span::new_unchecked(0, 5), Span::new_unchecked(6, 12)]);
        assert_eq!(split_sentences("Mr. Smith left."), vec![Span::new_unchecked(0, 15)]);
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("  ").is_empty());
    }

    #[test]
    fn sentence_edge_cases() {
        // lowercase continuation does not split
        assert_eq!(split_sentences("It was ok. the end").len(), 1);
        // digits start a sentence
        assert_eq!(split_sentences("Stayed twice! 10 out of 10.").len(), 2);
        // closing quote stays with its sentence
        let text = "He said \"Wow.\" Then left.";
        let spans = split_sentences(text);
        assert_eq!(spans, vec![Span::new_unchecked(0, 14), Span::new_unchecked(15, 25)]);
        // initials
        assert_eq!(split_sentences("Ask J. Doe about it.").len(), 1);
        // surrounding whitespace trimmed
        assert_eq!(split_sentences("  Hi there.  "), vec![Span::new_unchecked(2, 11)]);
        // no terminal punctuation
        assert_eq!(split_sentences("no punctuation"), vec![Span::new_unchecked(0, 14)]);
    }
}
