//! One PASS/FAIL line per acceptance criterion.
//!
//!     cargo test -p sli-cli --test acceptance -- --nocapture

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sha2::{Digest, Sha256};
use sli_core::benchmark::{build_single_law_dataset, load_cascade, BenchmarkSpec};
use sli_core::datagen::lcs::lcs;
use sli_core::datagen::{gen_rp_ri, GenConfig, RuleDb};
use sli_core::dsl::{compile_classical, parse_classical, parse_program_text, print_classical, print_law, read_law};
use sli_core::evaluation::{bonferroni, evaluate_dataset, levenshtein, reward, wilcoxon_signed_rank, Alternative, DistanceMode, Reward};
use sli_core::phonology::{load_lexicon, preprocess};
use sli_core::rewrite::{apply_word, find_matches};
use sli_core::task::{read_tasks, PbeTask};
use sli_core::{assets, Inventory, SoundLaw, Word};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn inv() -> &'static Inventory {
    Inventory::default_table()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rule(s: &str) -> Result<SoundLaw, String> {
    compile_classical(s, inv()).map_err(|e| format!("{s}: {e}"))
}

fn seg(s: &str) -> Word {
    inv().segment(s).unwrap()
}

fn gold_pass(tasks: &[PbeTask], samples: usize) -> Result<(f64, Option<f64>, Option<f64>), String> {
    let gold: Vec<Vec<Option<SoundLaw>>> = tasks.iter().map(|t| vec![t.gold_law.clone(); samples]).collect();
    let r = evaluate_dataset(tasks, &gold, inv(), DistanceMode::Phone).map_err(|e| e.to_string())?;
    Ok((r.aggregates.pass_rate, r.aggregates.reward_at_1, r.aggregates.reward_at_3))
}

fn condition_rows() -> Check {
    let cases: [(&str, &[(&str, &str)]); 4] = [
        ("t > d / _ #", &[("sunt", "sund"), ("tapere", "tapere")]),
        ("m > n / _ #", &[("tʰum", "tʰun"), ("sam", "san")]),
        ("u > o / _ C", &[("talun", "talon"), ("suat", "suat")]),
        ("k > ∅ / _ #", &[("manuk", "manu"), ("kakak", "kaka"), ("kaka", "kaka")]),
    ];
    for (r, pairs) in cases {
        let law = rule(r)?;
        for (src, tgt) in pairs {
            let got = apply_word(&law, &seg(src), inv());
            ensure(got == seg(tgt), || format!("{r}: {src} -> {got}, want {tgt}"))?;
        }
    }
    Ok(())
}

fn pre_j_law() -> Check {
    let ctor = "action = BasicAction(predicates=[lambda x: x == 'a', lambda x: x == '@', lambda x: x == 'j'], change_pos=[0], mapping_fn=[lambda x: 'e'])";
    let set = parse_program_text(ctor, inv());
    ensure(set.diagnostics.is_empty(), || format!("{:?}", set.diagnostics))?;
    let law = set.sound_laws().remove(0);
    ensure(law == rule("a > e / _ j")?, || "constructor and classical forms differ".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let w = random_symbols(&["a", "e", "i", "o", "j", "k"], &mut rng, 10);
        let got = apply_word(&law, &spelled(&w), inv());
        ensure(symbols(&got) == pre_j_oracle(&w), || format!("{w:?} -> {got}"))?;
    }
    Ok(())
}

fn reward_identities() -> Check {
    let src = vec![seg("talun"), seg("sunt")];
    let tgt = vec![seg("talon"), seg("sund")];
    let one = reward(&src, &tgt, &tgt, DistanceMode::Phone).map_err(|e| e.to_string())?;
    let zero = reward(&src, &src, &tgt, DistanceMode::Phone).map_err(|e| e.to_string())?;
    let neg = reward(&[seg("ka")], &[seg("kuu")], &[seg("ki")], DistanceMode::Phone).map_err(|e| e.to_string())?;
    ensure(one == Reward::from_integer(1) && zero == Reward::from_integer(0) && neg == Reward::from_integer(-1), || {
        format!("got {one}, {zero}, {neg}")
    })
}

fn gold_solvability() -> Check {
    let tasks = gen_rp_ri(&GenConfig::default(), inv(), 99, 2500).map_err(|e| e.to_string())?;
    ensure(tasks.len() == 2500, || format!("{} tasks", tasks.len()))?;
    let (pass, r1, r3) = gold_pass(&tasks, 20)?;
    ensure(pass == 1.0 && r1 == Some(1.0) && r3 == Some(1.0), || format!("pass {pass}, R@1 {r1:?}, R@3 {r3:?}"))
}

fn quota_audit() -> Check {
    let cfg = GenConfig { n_examples: 50, ..GenConfig::default() };
    let tasks = gen_rp_ri(&cfg, inv(), 2024, 1000).map_err(|e| e.to_string())?;
    for t in &tasks {
        let b = audit(t.gold_law.as_ref().unwrap(), &t.inputs, inv());
        ensure(t.inputs.len() == 50 && b.contain >= 34 && b.meets(50), || format!("{}: {b:?}", t.id))?;
    }
    Ok(())
}

fn self_feeding() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in &SELF_FEEDING {
        let law = rule(case.text)?;
        let mut recreated = 0;
        for _ in 0..600 {
            let w = random_symbols(&SELF_FEEDING_ALPHABET, &mut rng, 9);
            let (expect, sites) = case.oracle(&w);
            let input = spelled(&w);
            let found = find_matches(&law, &preprocess(&input), inv()).len();
            ensure(found == sites, || format!("{}: {w:?} has {sites} sites, found {found}", case.text))?;
            let out = apply_word(&law, &input, inv());
            ensure(symbols(&out) == expect, || format!("{}: {w:?} -> {out}, want {expect:?}", case.text))?;
            if sites > 0 && apply_word(&law, &out, inv()) != out {
                recreated += 1;
            }
        }
        ensure(recreated > 0, || format!("{} never recreates its environment", case.text))?;
    }
    Ok(())
}

fn distance_oracles() -> Check {
    let words = all_small_words();
    let index: HashMap<Vec<u8>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    for (i, a) in words.iter().enumerate() {
        let dist = bfs_distances(i, &words, &index);
        for (j, b) in words.iter().enumerate() {
            ensure(levenshtein(a, b) == dist[j], || format!("levenshtein {a:?} {b:?}"))?;
            let l = lcs(a, b);
            ensure(is_subseq(&l, a) && is_subseq(&l, b) && l.len() == brute_lcs_len(a, b), || format!("lcs {a:?} {b:?}"))?;
        }
    }
    Ok(())
}

fn bonferroni_levels() -> Check {
    let got = [bonferroni(0.05, 7), bonferroni(0.05, 5), bonferroni(0.05, 2)];
    ensure(format!("{:.5}", got[0]) == "0.00714" && got[1] == 0.01 && got[2] == 0.025, || format!("{got:?}"))
}

fn wilcoxon_reference() -> Check {
    let data: Value = serde_json::from_str(include_str!("../../core/tests/data/wilcoxon_reference.json")).unwrap();
    let cases = data["cases"].as_array().unwrap();
    ensure(cases.len() == 20, || format!("{} cases", cases.len()))?;
    for c in cases {
        let nums = |k: &str| -> Vec<f64> { c[k].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect() };
        let alt = match c["alternative"].as_str().unwrap() {
            "less" => Alternative::Less,
            "greater" => Alternative::Greater,
            _ => Alternative::TwoSided,
        };
        let r = wilcoxon_signed_rank(&nums("x"), &nums("y"), alt).map_err(|e| e.to_string())?;
        let stat = if alt == Alternative::TwoSided { r.statistic } else { r.w_plus };
        let (want_stat, want_p) = (c["statistic"].as_f64().unwrap(), c["p"].as_f64().unwrap());
        ensure(stat == want_stat && (r.p_value - want_p).abs() <= 1e-6, || {
            format!("{}: W {stat} vs {want_stat}, p {} vs {want_p}", c["name"], r.p_value)
        })?;
    }
    Ok(())
}

fn benchmark_shape() -> Check {
    let cascade = load_cascade("demo", assets::DEMO_CASCADE, inv()).map_err(|e| e.to_string())?;
    let lexicon = load_lexicon(assets::DEMO_LEXICON, inv()).map_err(|e| e.to_string())?;
    ensure(cascade.len() == 10 && lexicon.len() == 200, || "unexpected demo data size".into())?;
    let ds = build_single_law_dataset(&BenchmarkSpec::new(cascade, lexicon, "demo", 0), inv()).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = ds.tasks.iter().map(PbeTask::len).collect();
    ensure(sizes.len() == 10 && sizes.iter().all(|n| (11..=48).contains(n)), || format!("sizes {sizes:?}"))?;
    let (pass, _, _) = gold_pass(&ds.tasks, 3)?;
    ensure(pass == 1.0, || format!("gold pass rate {pass}"))
}

fn offline_replay() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("rp_li.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_sli"))
        .args(["--seed", "7", "--cache-only", "datagen", "--condition", "rp-li", "--count", "40", "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
    let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let golden = include_str!("data/rp_li_seed7_n40.sha256").trim();
    ensure(digest == golden, || format!("sha256 {digest}, golden {golden}"))?;
    let tasks = read_tasks(bytes.as_slice()).map_err(|e| e.to_string())?;
    let (pass, _, _) = gold_pass(&tasks, 3)?;
    ensure(tasks.len() == 40 && pass == 1.0, || format!("{} tasks, gold pass rate {pass}", tasks.len()))
}

fn parser_round_trips() -> Check {
    let cfg = GenConfig::default();
    for i in 0..10_000u64 {
        let mut rng = sli_core::datagen::task_rng(1, i);
        let law = sli_core::datagen::sample_random_law(&cfg, inv(), &mut rng);
        let text = print_law(&law);
        let back = read_law(&text).map_err(|e| e.to_string())?;
        ensure(back == law && print_law(&back) == text, || format!("json round trip: {text}"))?;
    }
    let (db, warnings) = RuleDb::load(assets::RULE_DB, inv());
    ensure(warnings.is_empty(), || format!("{warnings:?}"))?;
    for e in &db.rules {
        let printed = print_classical(&e.rule);
        let again = parse_classical(&printed).map_err(|err| format!("{printed}: {err}"))?;
        ensure(again == e.rule, || format!("classical round trip: {}", e.text))?;
    }
    let blocks: Vec<&str> = include_str!("../../core/tests/data/table_constructors.txt")
        .split("\n\n")
        .map(str::trim)
        .filter(|b| !b.is_empty())
        .collect();
    ensure(blocks.len() == 20, || format!("{} constructors", blocks.len()))?;
    for b in blocks {
        let set = parse_program_text(b, inv());
        ensure(set.diagnostics.is_empty() && set.laws.len() == 1, || format!("{b}: {:?}", set.diagnostics))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("condition table rows", condition_rows, Duration::from_secs(1)),
        ("pre-j law vs window scan", pre_j_law, Duration::from_secs(5)),
        ("reward identities", reward_identities, Duration::from_secs(1)),
        ("gold-oracle solvability (2500 RP-RI)", gold_solvability, Duration::from_secs(120)),
        ("RP-RI input quota audit", quota_audit, Duration::from_secs(60)),
        ("self-feeding suppression", self_feeding, Duration::from_secs(5)),
        ("Levenshtein/LCS oracles", distance_oracles, Duration::from_secs(30)),
        ("Bonferroni levels", bonferroni_levels, Duration::from_secs(1)),
        ("Wilcoxon cross-check", wilcoxon_reference, Duration::from_secs(10)),
        ("benchmark shape", benchmark_shape, Duration::from_secs(10)),
        ("offline RP-LI replay", offline_replay, Duration::from_secs(30)),
        ("parser round trips", parser_round_trips, Duration::from_secs(30)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match (&result, took <= *budget) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over the {budget:?} budget)"),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        println!("[{:>2}] {} {name} ({:.2}s)", i + 1, verdict, took.as_secs_f64());
        if !verdict.starts_with("PASS") {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("{} of {} criteria passed", criteria.len(), criteria.len());
}
