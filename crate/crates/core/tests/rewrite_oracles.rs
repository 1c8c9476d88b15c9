//! Rewrite engine against hand-written string oracles.

mod common;

use common::{pre_j_oracle, random_symbols, spelled, symbols, SELF_FEEDING, SELF_FEEDING_ALPHABET};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sli_core::dsl::{compile_classical, parse_program_text};
use sli_core::phonology::preprocess;
use sli_core::rewrite::{apply_word, find_matches};
use sli_core::{Inventory, Word};

fn inv() -> &'static Inventory {
    Inventory::default_table()
}

fn word(s: &str) -> Word {
    inv().segment(s).unwrap()
}

fn rule(s: &str) -> sli_core::SoundLaw {
    compile_classical(s, inv()).unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn condition_rows() {
    let cases: [(&str, &[(&str, &str)]); 4] = [
        ("t > d / _ #", &[("sunt", "sund"), ("tapere", "tapere")]),
        ("m > n / _ #", &[("tʰum", "tʰun"), ("sam", "san")]),
        ("u > o / _ C", &[("talun", "talon"), ("suat", "suat")]),
        ("k > ∅ / _ #", &[("manuk", "manu"), ("kakak", "kaka"), ("kaka", "kaka")]),
    ];
    for (r, pairs) in cases {
        let law = rule(r);
        for (src, tgt) in pairs {
            assert_eq!(apply_word(&law, &word(src), inv()), word(tgt), "{r} on {src}");
        }
    }
}

const FIGURE_LAW: &str = "action = BasicAction(predicates=[lambda x: x == 'a', lambda x: x == '@', lambda x: x == 'j'], change_pos=[0], mapping_fn=[lambda x: 'e'])";

#[test]
fn pre_j_law_matches_window_scan() {
    let set = parse_program_text(FIGURE_LAW, inv());
    assert!(set.diagnostics.is_empty(), "{:?}", set.diagnostics);
    let from_ctor = set.sound_laws().remove(0);
    let from_rule = rule("a > e / _ j");
    assert_eq!(from_ctor, from_rule);

    let alphabet = ["a", "e", "i", "o", "j", "k"];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let w = random_symbols(&alphabet, &mut rng, 10);
        let expect: Vec<String> = pre_j_oracle(&w);
        let got = apply_word(&from_ctor, &spelled(&w), inv());
        assert_eq!(symbols(&got), expect, "{w:?}");
    }
}

#[test]
fn self_feeding_applies_once_per_original_site() {
    let alphabet = SELF_FEEDING_ALPHABET;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in &SELF_FEEDING {
        let law = rule(case.text);
        let mut recreated = 0;
        for round in 0..600 {
            let w = if round < 7 { vec![alphabet[round]; 5] } else { random_symbols(&alphabet, &mut rng, 9) };
            let (expect, sites) = case.oracle(&w);
            let input = spelled(&w);
            assert_eq!(find_matches(&law, &preprocess(&input), inv()).len(), sites, "{} on {w:?}", case.text);
            let out = apply_word(&law, &input, inv());
            assert_eq!(symbols(&out), expect, "{} on {w:?}", case.text);
            // one pass never edits a site twice: a second pass would
            if sites > 0 && !find_matches(&law, &preprocess(&out), inv()).is_empty() && apply_word(&law, &out, inv()) != out {
                recreated += 1;
            }
        }
        assert!(recreated > 0, "{} never recreates its environment", case.text);
    }
}

proptest! {
    #[test]
    fn sites_come_from_the_original(w in proptest::collection::vec(prop::sample::select(vec!["a", "j", "e", "k"]), 1..12)) {
        let law = rule("a > e / _ j");
        let out = apply_word(&law, &spelled(&w), inv());
        prop_assert_eq!(symbols(&out), pre_j_oracle(&w));
    }
}
