//! Rebuilds the bundled replay fixtures in `assets/fixtures/`.
//!
//! The transcripts stand in for a model: each one proposes a law read off
//! the round's seed words, with some rounds answered in prose only, some
//! with an inert first attempt and some that repeat the class definition.
//!
//!     cargo run -p sli-core --example synth_fixtures

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use sli_core::datagen::llm::{round_seed_words, usable_programs};
use sli_core::datagen::task_rng;
use sli_core::dsl::{compile_classical, print_constructor};
use sli_core::gateway::{build_datagen_prompt, fixtures_to_jsonl, FixtureRecord, TemplateId};
use sli_core::phonology::load_lexicon;
use sli_core::{assets, Inventory, Word};

const SEED: u64 = 7;
const MAX_ROUNDS: usize = 5;

const TARGETS: [&str; 10] = ["e", "o", "i", "d", "g", "v", "z", "ʃ", "ŋ", "ə"];

const REDEFINITION: &str = "```python
class BasicAction:
    def __init__(self, predicates, change_pos, mapping_fn):
        self.predicates = predicates
        self.change_pos = change_pos
        self.mapping_fn = mapping_fn
```
";

fn quote_list(words: &[String]) -> String {
    let items: Vec<String> = words.iter().map(|w| format!("'{w}'")).collect();
    format!("[{}]", items.join(", "))
}

/// A classical rule read off one of the seed words.
fn propose(seeds: &[Word], rng: &mut impl Rng) -> String {
    let w = seeds.choose(rng).expect("five seeds");
    let ph = w.phones();
    let p = rng.gen_range(0..ph.len());
    let a = ph[p].as_str();
    let b = loop {
        let t = *TARGETS.choose(rng).expect("non-empty");
        if t != a {
            break t;
        }
    };
    match rng.gen_range(0..4) {
        0 => format!("{a} > {b}"),
        1 if p + 1 < ph.len() => format!("{a} > {b} / _ {}", ph[p + 1]),
        1 | 2 if p + 1 == ph.len() => format!("{a} > ∅ / _ #"),
        2 if p > 0 => format!("{a} > {b} / {} _", ph[p - 1]),
        3 => format!("∅ > {b} / {a} _"),
        _ => format!("{a} > {b} / _ {{{},{b}}}", ph.get(p + 1).map_or("#", |x| x.as_str())),
    }
}

fn transcript(kind: TemplateId, index: usize, round: usize, seeds: &[Word], inv: &Inventory, rng: &mut impl Rng) -> String {
    if round == 0 && index % 9 == 4 {
        return "I am not able to write an action for these words without more information.\n".to_string();
    }
    let mut out = String::from("Here are some actions that apply to the given words.\n\n");
    if index % 7 == 3 {
        out.push_str(REDEFINITION);
        out.push('\n');
    }
    let law = loop {
        let rule = propose(seeds, rng);
        if let Ok(law) = compile_classical(&rule, inv) {
            break law;
        }
    };
    let affected: Vec<String> = seeds
        .iter()
        .filter(|w| sli_core::rewrite::apply_word(&law, w, inv) != **w)
        .map(|w| w.to_string())
        .collect();
    let mut block = String::from("```python\n");
    if index % 5 == 2 {
        let inert = compile_classical("ʒ > z / _ ʒ", inv).expect("valid rule");
        block.push_str(&print_constructor(&inert, inv));
        block.push('\n');
        if kind == TemplateId::RpLiDatagen {
            block.push_str("nonce_inputs = ['zhuzh']\n");
        }
        block.push('\n');
    }
    block.push_str(&print_constructor(&law, inv));
    block.push('\n');
    if kind == TemplateId::RpLiDatagen {
        block.push_str(&format!("nonce_inputs = {}\n", quote_list(&affected)));
    }
    if index % 6 == 5 {
        let extra = loop {
            if let Ok(l) = compile_classical(&propose(seeds, rng), inv) {
                break l;
            }
        };
        block.push('\n');
        block.push_str(&print_constructor(&extra, inv));
        block.push('\n');
    }
    block.push_str("```\n");
    out.push_str(&block);
    out.push_str("\nEach action changes at least one of the words above.\n");
    out
}

fn build(kind: TemplateId, pool_text: &str, count: usize, inv: &Inventory) -> Vec<FixtureRecord> {
    let pool = load_lexicon(pool_text, inv).expect("bundled lexicon");
    let mut records = Vec::new();
    for index in 0..count {
        let mut rng = task_rng(SEED, index as u64);
        // a separate stream drives the stand-in model so the generator's draws stay untouched
        let mut model = task_rng(SEED ^ 0x5eed, index as u64);
        for round in 0..MAX_ROUNDS {
            let seeds = round_seed_words(&pool, &mut rng);
            let prompt = build_datagen_prompt(kind, &seeds).expect("five seeds");
            let content = transcript(kind, index, round, &seeds, inv, &mut model);
            let usable = !usable_programs(&content, &seeds, inv).is_empty();
            records.push(FixtureRecord { prompt_hash: prompt.hash, sample_index: 0, content });
            if usable {
                break;
            }
        }
    }
    records
}

fn main() {
    let inv = Inventory::default_table();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/fixtures");
    fs::create_dir_all(&dir).expect("fixture directory");
    let li = build(TemplateId::RpLiDatagen, assets::NONCE_WORDS, 40, inv);
    fs::write(dir.join("rp_li.jsonl"), fixtures_to_jsonl(&li)).expect("write rp-li fixtures");
    let pi = build(TemplateId::RpPiDatagen, assets::POC_LEXICON, 20, inv);
    fs::write(dir.join("rp_pi_poc.jsonl"), fixtures_to_jsonl(&pi)).expect("write rp-pi fixtures");
    println!("{} rp-li and {} rp-pi transcripts", li.len(), pi.len());
}
