//! Seeded synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use fusebench::corpus::{Alignment, Document, FicInstance, Highlight, Origin, ReviewSet, Span, Split};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NOUNS: &[&str] = &[
    "room", "staff", "pool", "breakfast", "location", "bed", "view", "bathroom", "service", "price", "lobby", "shower",
];
const ADJECTIVES: &[&str] = &["clean", "friendly", "great", "noisy", "small", "cheap", "spacious", "rude", "quiet", "dirty"];

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
}

pub fn sentence(rng: &mut ChaCha8Rng) -> String {
    let noun = NOUNS[rng.random_range(0..NOUNS.len())];
    let adj = ADJECTIVES[rng.random_range(0..ADJECTIVES.len())];
    match rng.random_range(0..3) {
        0 => format!("The {noun} was {adj}."),
        1 => format!("{} {noun}s and a {adj} {}.", capitalize(adj), NOUNS[rng.random_range(0..NOUNS.len())]),
        _ => format!("We found the {noun} really {adj}!"),
    }
}

pub fn paragraph(rng: &mut ChaCha8Rng, sentences: usize) -> String {
    (0..sentences).map(|_| sentence(rng)).collect::<Vec<_>>().join(" ")
}

/// One or two sorted, non-overlapping, non-empty spans inside `len` chars.
pub fn random_spans(rng: &mut ChaCha8Rng, len: usize) -> Vec<Span> {
    assert!(len >= 4);
    if rng.random_bool(0.5) {
        let start = rng.random_range(0..len - 1);
        let end = rng.random_range(start + 1..=len.min(start + 25));
        vec![Span::from((start, end))]
    } else {
        let mut cuts: Vec<usize> = (0..4).map(|_| rng.random_range(0..=len)).collect();
        cuts.sort();
        let a = cuts[0].min(len - 1);
        let b = cuts[1].max(a + 1).min(len);
        let (c, d) = (cuts[2], cuts[3]);
        let c = c.max(b);
        let d = d.max(c + 1).min(len);
        let mut spans = vec![Span::from((a, b))];
        if c < d {
            spans.push(Span::from((c, d)));
        }
        spans.retain(|s| s.start < s.end);
        spans
    }
}

pub struct InstanceShape {
    pub reviews: usize,
    pub summary_sentences: usize,
    /// Probability that a summary sentence receives no alignment.
    pub unaligned: f64,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape { reviews: 3, summary_sentences: 3, unaligned: 0.15 }
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, set_id: &str, summary_id: &str, shape: &InstanceShape, split: Split) -> FicInstance {
    let reviews: Vec<Document> = (0..shape.reviews)
        .map(|r| {
            let n = rng.random_range(2..5);
            Document::new(format!("{set_id}-r{r}"), &paragraph(rng, n))
        })
        .collect();
    let review_set = ReviewSet { id: set_id.to_string(), reviews, origin: Origin::Other };
    let summary = Document::new(summary_id, &paragraph(rng, shape.summary_sentences));
    let mut alignments = Vec::new();
    for s in 0..summary.sentences.len() {
        if rng.random_bool(shape.unaligned) {
            continue;
        }
        for _ in 0..rng.random_range(1..=2) {
            let review = &review_set.reviews[rng.random_range(0..review_set.reviews.len())];
            alignments.push(Alignment {
                summary_sentence_index: s,
                summary_spans: vec![summary.sentences[s]],
                highlight: Highlight { review_id: review.id.clone(), spans: random_spans(rng, review.char_len()) },
                aspect_label: None,
                annotator_id: "w1".into(),
            });
        }
    }
    FicInstance::new(format!("{set_id}__{summary_id}"), review_set, summary, alignments, split)
}

/// `n` instances over `n / 2` review sets (rounded up), each with at least one
/// alignment.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<FicInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = InstanceShape::default();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let set = format!("set{:03}", out.len() / 2);
        let summary = format!("s{}", out.len() % 2);
        let split = Split::ALL[out.len() % 3];
        let inst = random_instance(&mut rng, &set, &summary, &shape, split);
        if !inst.alignments.is_empty() {
            out.push(inst);
        }
    }
    out
}

/// The fixture used by hand-computed examples: two short reviews and a
/// two-sentence summary.
pub fn hotel_instance(split: Split) -> FicInstance {
    let r0 = Document::new("r0", "The pool was great. Staff were rude.");
    let r1 = Document::new("r1", "Great pool and clean rooms.");
    let summary = Document::new("s", "The pool is great. Rooms are clean.");
    let align = |sentence: usize, review: &str, spans: Vec<(usize, usize)>| Alignment {
        summary_sentence_index: sentence,
        summary_spans: vec![],
        highlight: Highlight { review_id: review.into(), spans: spans.into_iter().map(Span::from).collect() },
        aspect_label: None,
        annotator_id: "w1".into(),
    };
    let alignments = vec![align(0, "r0", vec![(0, 19)]), align(0, "r1", vec![(0, 10)]), align(1, "r1", vec![(15, 26)])];
    let review_set = ReviewSet { id: "hotel".into(), reviews: vec![r0, r1], origin: Origin::Other };
    FicInstance::new("hotel__s", review_set, summary, alignments, split)
}

fn fixture_alignment(sentence: usize, review: &str, spans: &[(usize, usize)]) -> Alignment {
    Alignment {
        summary_sentence_index: sentence,
        summary_spans: vec![],
        highlight: Highlight { review_id: review.into(), spans: spans.iter().copied().map(Span::from).collect() },
        aspect_label: None,
        annotator_id: "w1".into(),
    }
}

/// Four instances over three review sets whose statistics are worked out by
/// hand in the dataset tests.
pub fn stats_fixture() -> Vec<FicInstance> {
    let set = |id: &str, reviews: &[(&str, &str)]| ReviewSet {
        id: id.into(),
        reviews: reviews.iter().map(|(rid, text)| Document::new(*rid, text)).collect(),
        origin: Origin::Other,
    };
    let a = set("A", &[("A-r0", "Good bed. Bad view."), ("A-r1", "Nice staff.")]);
    let b = set("B", &[("B-r0", "Loud room.")]);
    let c = set("C", &[("C-r0", "Cheap. Very cheap. Great price."), ("C-r1", "Small pool.")]);
    vec![
        FicInstance::new(
            "A__s0",
            a.clone(),
            Document::new("s0", "Good bed. Nice staff."),
            vec![fixture_alignment(0, "A-r0", &[(0, 9)]), fixture_alignment(1, "A-r1", &[(0, 11)])],
            Split::Train,
        ),
        FicInstance::new(
            "A__s1",
            a,
            Document::new("s1", "Bad view and good bed."),
            vec![fixture_alignment(0, "A-r0", &[(0, 9), (10, 19)]), fixture_alignment(0, "A-r1", &[(0, 4)])],
            Split::Train,
        ),
        FicInstance::new("B__s0", b, Document::new("s0", "Room was loud."), vec![fixture_alignment(0, "B-r0", &[(0, 10)])], Split::Test),
        FicInstance::new(
            "C__s0",
            c,
            Document::new("s0", "It was cheap. Pool was small."),
            vec![fixture_alignment(0, "C-r0", &[(0, 6)])],
            Split::Dev,
        ),
    ]
}
