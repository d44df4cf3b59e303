mod common;

use citescope::sentiment::{bundled_lexicon, normalize, score, ValenceLexicon, ALPHA};
use proptest::prelude::*;

fn golden() -> Vec<(String, String)> {
    include_str!("data/golden_sentences.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (label, text) = l.split_once('\t').unwrap();
            (label.to_string(), text.to_string())
        })
        .collect()
}

#[test]
fn normalization_anchors() {
    assert_eq!(normalize(0.0), 0.0);
    assert!((normalize(2.0) - 2.0 / 19f64.sqrt()).abs() < 1e-9);
    assert!((normalize(-2.0) + 2.0 / 19f64.sqrt()).abs() < 1e-9);
    assert_eq!(ALPHA, 15.0);
}

#[test]
fn golden_set_is_neutral_majority_and_signs_agree() {
    let set = golden();
    assert_eq!(set.len(), 50);
    let lex = bundled_lexicon();
    let mut neutral = 0.0;
    for (label, text) in &set {
        let s = score(text, lex);
        neutral += s.neu;
        match label.as_str() {
            "pos" => assert!(s.compound > 0.0, "{text}: {s:?}"),
            "neg" => assert!(s.compound < 0.0, "{text}: {s:?}"),
            _ => assert_eq!(s.compound, 0.0, "{text}: {s:?}"),
        }
    }
    assert!(neutral / set.len() as f64 > 0.9);
}

const VOCAB: [&str; 24] = [
    "good",
    "bad",
    "not",
    "very",
    "but",
    "no",
    "GREAT",
    "poor",
    "slightly",
    "never",
    "CITE",
    "model",
    "the",
    "results",
    "excellent",
    "isn't",
    "hardly",
    "failure",
    "extremely",
    "useful",
    "!",
    "?",
    "Data",
    "wrong",
];

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec((0..VOCAB.len(), any::<bool>()), 0..25).prop_map(|words| {
        let mut s = String::new();
        for (w, glue) in words {
            if !s.is_empty() && !glue {
                s.push(' ');
            }
            s.push_str(VOCAB[w]);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn shares_sum_to_one_and_compound_bounded(text in sentence()) {
        let s = score(&text, bundled_lexicon());
        prop_assert!((s.pos + s.neu + s.neg - 1.0).abs() < 1e-6);
        prop_assert!((-1.0..=1.0).contains(&s.compound));
        prop_assert!(s.pos >= 0.0 && s.neu >= 0.0 && s.neg >= 0.0);
    }

    #[test]
    fn negated_lexicon_mirrors_scores(text in sentence()) {
        let lex = bundled_lexicon();
        let mirrored: ValenceLexicon = lex.negated();
        let (a, b) = (score(&text, lex), score(&text, &mirrored));
        prop_assert!((a.compound + b.compound).abs() < 1e-12);
        prop_assert!((a.pos - b.neg).abs() < 1e-12 && (a.neg - b.pos).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_odd_and_bounded(x in -1e6f64..1e6) {
        prop_assert_eq!(normalize(-x), -normalize(x));
        prop_assert!(normalize(x).abs() < 1.0 || x.abs() > 1e3);
    }
}
