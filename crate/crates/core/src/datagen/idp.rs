//! Attested rules over protolanguage inputs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::lcs::lcs;
use super::rules::{RuleDb, RuleEntry};
use super::{task_rng, GenConfig, GenError};
use crate::dsl::classical::ContextAtom;
use crate::phonology::{Inventory, Phone, Word};
use crate::rewrite::apply_to_lexicon;
use crate::task::{Condition, PbeTask, Provenance};

/// Greedy left-to-right scans of `word` for `cand` as a subsequence; each
/// completed scan counts once and the next starts after it.
pub fn scan_occurrences(cand: &[Phone], word: &[Phone]) -> usize {
    if cand.is_empty() {
        return 0;
    }
    let mut count = 0;
    let mut k = 0;
    for ph in word {
        if *ph == cand[k] {
            k += 1;
            if k == cand.len() {
                count += 1;
                k = 0;
            }
        }
    }
    count
}

/// Distinct non-empty pairwise LCS candidates with their weights, in a
/// deterministic order.
pub fn idp_context_weights(inputs: &[Word]) -> Vec<(Vec<Phone>, usize)> {
    let mut cands: BTreeSet<Vec<Phone>> = BTreeSet::new();
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            let c = lcs(inputs[i].phones(), inputs[j].phones());
            if !c.is_empty() {
                cands.insert(c);
            }
        }
    }
    cands
        .into_iter()
        .map(|c| {
            let w = inputs.iter().map(|x| scan_occurrences(&c, x.phones())).sum();
            (c, w)
        })
        .collect()
}

/// Draws a context with probability proportional to its weight.
pub fn sample_idp_context(inputs: &[Word], rng: &mut impl Rng) -> Result<Vec<Phone>, GenError> {
    let weights = idp_context_weights(inputs);
    if weights.is_empty() {
        return Err(GenError::NoCommonSubsequence);
    }
    let (c, _) = weights.choose_weighted(rng, |(_, w)| *w).map_err(|_| GenError::NoCommonSubsequence)?;
    Ok(c.clone())
}

/// Whether every phone the rule names outside its target occurs in `context`.
/// A set needs only one member there.
pub fn rule_fits_context(entry: &RuleEntry, context: &BTreeSet<Phone>, inv: &Inventory) -> bool {
    let has = |sym: &str| match inv.segment(sym) {
        Ok(w) => w.phones().iter().all(|p| context.contains(p)),
        Err(_) => false,
    };
    let rule = &entry.rule;
    rule.focus.iter().all(|s| has(s))
        && rule.left.iter().chain(&rule.right).all(|atom| match atom {
            ContextAtom::Segments(s) => has(s),
            ContextAtom::Set(items) => items.iter().any(|s| has(s)),
            ContextAtom::Boundary | ContextAtom::Class(_) => true,
        })
}

/// Rules applicable to `inputs` under `context`.
pub fn applicable_rules<'a>(
    db: &'a RuleDb,
    inputs: &[Word],
    context: &[Phone],
    inv: &Inventory,
) -> Vec<&'a RuleEntry> {
    let ctx: BTreeSet<Phone> = context.iter().cloned().collect();
    db.rules
        .iter()
        .filter(|r| rule_fits_context(r, &ctx, inv) && apply_to_lexicon(&r.law, inputs, inv).any_changed())
        .collect()
}

fn one_idp(
    db: &RuleDb,
    lexicon: &[Word],
    source: &str,
    cfg: &GenConfig,
    inv: &Inventory,
    seed: u64,
    index: usize,
) -> Result<PbeTask, GenError> {
    let mut rng = task_rng(seed, index as u64);
    for _ in 0..cfg.retry_budget {
        let inputs: Vec<Word> = lexicon.choose_multiple(&mut rng, cfg.n_examples).cloned().collect();
        let context = match sample_idp_context(&inputs, &mut rng) {
            Ok(c) => c,
            Err(GenError::NoCommonSubsequence) => continue,
            Err(e) => return Err(e),
        };
        let Some(entry) = applicable_rules(db, &inputs, &context, inv).choose(&mut rng).copied() else {
            continue;
        };
        let outputs = apply_to_lexicon(&entry.law, &inputs, inv).outputs;
        return Ok(PbeTask {
            id: format!("idp-pi-{source}-{seed}-{index:05}"),
            condition: Condition::IdpPi,
            inputs,
            outputs,
            gold_law: Some(entry.law.clone()),
            provenance: Provenance { seed, source: format!("{source}: {}", entry.text), language_pair: None },
        });
    }
    Err(GenError::NoApplicableRule)
}

/// Generates `count` tasks from rules in `db` over words of `lexicon`;
/// `source` names the lexicon (e.g. `poc`).
pub fn gen_idp_pi(
    db: &RuleDb,
    lexicon: &[Word],
    source: &str,
    cfg: &GenConfig,
    inv: &Inventory,
    seed: u64,
    count: usize,
) -> Result<Vec<PbeTask>, GenError> {
    cfg.validate()?;
    if lexicon.len() < cfg.n_examples {
        return Err(GenError::LexiconTooSmall { needed: cfg.n_examples, have: lexicon.len() });
    }
    if db.is_empty() {
        return Err(GenError::NoApplicableRule);
    }
    (0..count).into_par_iter().map(|i| one_idp(db, lexicon, source, cfg, inv, seed, i)).collect()
}

/// Tally of which rule texts a corpus used, for diversity reports.
pub fn rule_histogram(tasks: &[PbeTask]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in tasks {
        *out.entry(t.provenance.source.clone()).or_insert(0) += 1;
    }
    out
}
