//! Random programs over random inputs.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{task_rng, GenConfig, GenError};
use crate::phonology::{FeatureClass, Inventory, Phone, Token, Word};
use crate::rewrite::{apply_to_lexicon, Mapping, Predicate, SoundLaw};
use crate::task::{Condition, PbeTask, Provenance};

/// Classes a random slot may use; the boundary/separator classes are excluded.
const SLOT_CLASSES: [FeatureClass; 6] = [
    FeatureClass::Consonant,
    FeatureClass::Vowel,
    FeatureClass::Velar,
    FeatureClass::LiquidConsonant,
    FeatureClass::ContNotSon,
    FeatureClass::Son,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoundaryCondition {
    Start,
    End,
    NotStart,
    NotEnd,
}

fn random_phone(inv: &Inventory, rng: &mut impl Rng) -> Phone {
    inv.segments().choose(rng).expect("inventory is non-empty").clone()
}

fn random_slot(cfg: &GenConfig, inv: &Inventory, rng: &mut impl Rng) -> Predicate {
    let m = cfg.predicate_mix;
    let r = rng.gen::<f64>() * (m.literal + m.set + m.class);
    if r < m.literal {
        Predicate::IsToken(Token::Phone(random_phone(inv, rng)))
    } else if r < m.literal + m.set {
        let size = rng.gen_range(2..=4).min(inv.len());
        let mut members: Vec<Token> =
            inv.segments().choose_multiple(rng, size).cloned().map(Token::Phone).collect();
        members.sort();
        Predicate::InSet(members)
    } else {
        let usable: Vec<FeatureClass> =
            SLOT_CLASSES.into_iter().filter(|c| !inv.class_members(*c).is_empty()).collect();
        match usable.choose(rng) {
            Some(c) => Predicate::FeatureClass(*c),
            None => Predicate::IsToken(Token::Phone(random_phone(inv, rng))),
        }
    }
}

fn random_edit(slot: &Predicate, inv: &Inventory, rng: &mut impl Rng) -> Mapping {
    let phone = loop {
        let p = random_phone(inv, rng);
        // a literal slot replaced by itself would be a no-op
        if *slot != Predicate::IsToken(Token::Phone(p.clone())) {
            break p;
        }
    };
    match rng.gen_range(0..3) {
        0 => Mapping::ReplaceWith(vec![phone]),
        1 => Mapping::Delete,
        _ if rng.gen_bool(0.5) => Mapping::InsertBefore(vec![phone]),
        _ => Mapping::InsertAfter(vec![phone]),
    }
}

/// Interleaves `@` between the slots.
fn interleave(slots: Vec<Predicate>) -> Vec<Predicate> {
    let mut out = Vec::with_capacity(slots.len() * 2);
    for (i, s) in slots.into_iter().enumerate() {
        if i > 0 {
            out.push(Predicate::IsToken(Token::Separator));
        }
        out.push(s);
    }
    out
}

/// Samples a law: 1-3 phone slots, an optional boundary condition, and
/// 1-3 edits at distinct slots.
pub fn sample_random_law(cfg: &GenConfig, inv: &Inventory, rng: &mut impl Rng) -> SoundLaw {
    let c = rng.gen_range(cfg.context_min..=cfg.context_max);
    let slots: Vec<Predicate> = (0..c).map(|_| random_slot(cfg, inv, rng)).collect();
    let boundary = rng.gen_bool(cfg.boundary_prob).then(|| {
        *[BoundaryCondition::Start, BoundaryCondition::End, BoundaryCondition::NotStart, BoundaryCondition::NotEnd]
            .choose(rng)
            .expect("non-empty")
    });
    let k = rng.gen_range(1..=cfg.max_edits.min(c));
    let mut edited: Vec<usize> = rand::seq::index::sample(rng, c, k).into_vec();
    edited.sort_unstable();
    let edits: Vec<(usize, Mapping)> = edited.iter().map(|&s| (s, random_edit(&slots[s], inv, rng))).collect();

    let mut predicates = interleave(slots);
    let mut offset = 0;
    match boundary {
        Some(BoundaryCondition::Start) | Some(BoundaryCondition::NotStart) => {
            let edge = if boundary == Some(BoundaryCondition::Start) {
                Predicate::IsToken(Token::Boundary)
            } else {
                Predicate::IsNotToken(Token::Boundary)
            };
            predicates.splice(0..0, [edge, Predicate::IsToken(Token::Separator)]);
            offset = 2;
        }
        Some(BoundaryCondition::End) => {
            predicates.extend([Predicate::IsToken(Token::Separator), Predicate::IsToken(Token::Boundary)]);
        }
        Some(BoundaryCondition::NotEnd) => {
            predicates.extend([Predicate::IsToken(Token::Separator), Predicate::IsNotToken(Token::Boundary)]);
        }
        None => {}
    }
    let (change_pos, mappings) = edits.into_iter().map(|(s, m)| (offset + 2 * s, m)).unzip();
    SoundLaw::new(predicates, change_pos, mappings).expect("sampled laws are well formed")
}

/// The law's phone-slot window with boundary conditions stripped: the
/// "context" the input quotas refer to.
pub fn context_pattern(law: &SoundLaw) -> Vec<Predicate> {
    let preds = law.predicates();
    let boundary_like = |p: &Predicate| matches!(p, Predicate::IsToken(Token::Boundary) | Predicate::IsNotToken(Token::Boundary));
    let mut lo = 0;
    let mut hi = preds.len();
    // strip a leading `# @` / `≠# @` and a trailing `@ #` / `@ ≠#`
    if hi >= 3 && boundary_like(&preds[0]) {
        lo = 2;
    }
    if hi - lo >= 3 && boundary_like(&preds[hi - 1]) {
        hi -= 2;
    }
    preds[lo..hi].iter().step_by(2).cloned().collect()
}

/// Positions where `pattern` matches the phones of `word`.
pub fn pattern_positions(pattern: &[Predicate], word: &Word, inv: &Inventory) -> Vec<usize> {
    let phones = word.phones();
    if pattern.is_empty() || pattern.len() > phones.len() {
        return Vec::new();
    }
    (0..=phones.len() - pattern.len())
        .filter(|&i| {
            pattern
                .iter()
                .zip(&phones[i..])
                .all(|(p, ph)| p.matches(&Token::Phone(ph.clone()), inv))
        })
        .collect()
}

fn instantiate(pattern: &[Predicate], inv: &Inventory, rng: &mut impl Rng) -> Vec<Phone> {
    pattern
        .iter()
        .map(|p| {
            let candidates: Vec<Phone> = match p {
                Predicate::IsToken(Token::Phone(ph)) => vec![ph.clone()],
                Predicate::InSet(ts) => ts.iter().filter_map(Token::as_phone).cloned().collect(),
                Predicate::FeatureClass(c) => inv.class_members(*c),
                other => inv
                    .segments()
                    .iter()
                    .filter(|ph| other.matches(&Token::Phone((*ph).clone()), inv))
                    .cloned()
                    .collect(),
            };
            candidates.choose(rng).cloned().expect("pattern slots can hold a phone")
        })
        .collect()
}

fn random_word(len: usize, inv: &Inventory, rng: &mut impl Rng) -> Vec<Phone> {
    (0..len).map(|_| random_phone(inv, rng)).collect()
}

/// How many words each quota bucket needs for `n` examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotaCounts {
    pub contain: usize,
    pub begin: usize,
    pub end: usize,
    pub interior_one: usize,
    pub interior_two: usize,
}

impl QuotaCounts {
    pub fn for_n(n: usize) -> Self {
        let tenth = n / 10;
        QuotaCounts { contain: (2 * n).div_ceil(3), begin: tenth, end: tenth, interior_one: tenth, interior_two: tenth }
    }
}

/// Samples `cfg.n_examples` words meeting every input quota at once.
pub fn sample_inputs_for_law(
    law: &SoundLaw,
    cfg: &GenConfig,
    inv: &Inventory,
    rng: &mut impl Rng,
) -> Result<Vec<Word>, GenError> {
    let pattern = context_pattern(law);
    let c = pattern.len();
    let q = QuotaCounts::for_n(cfg.n_examples);
    let (lo, hi) = (cfg.word_len_min, cfg.word_len_max);
    if c > hi {
        return Err(GenError::InfeasibleQuota(format!("context of {c} phones exceeds the maximum word length {hi}")));
    }
    if q.interior_one > 0 && c + 2 > hi {
        return Err(GenError::InfeasibleQuota(format!("no room for an interior occurrence of a {c}-phone context")));
    }
    if q.interior_two > 0 && 2 * c + 2 > hi {
        return Err(GenError::InfeasibleQuota(format!("no room for two interior occurrences of a {c}-phone context")));
    }
    if q.begin + q.end + q.interior_one + q.interior_two > q.contain {
        return Err(GenError::InfeasibleQuota("buckets exceed the example count".into()));
    }

    let mut out: Vec<Word> = Vec::with_capacity(cfg.n_examples);
    for _ in 0..q.begin {
        let len = rng.gen_range(lo.max(c)..=hi);
        let mut phones = instantiate(&pattern, inv, rng);
        phones.extend(random_word(len - c, inv, rng));
        out.push(Word::new(phones));
    }
    for _ in 0..q.end {
        let len = rng.gen_range(lo.max(c)..=hi);
        let mut phones = random_word(len - c, inv, rng);
        phones.extend(instantiate(&pattern, inv, rng));
        out.push(Word::new(phones));
    }
    for _ in 0..q.interior_one {
        let len = rng.gen_range(lo.max(c + 2)..=hi);
        let p = rng.gen_range(1..=len - c - 1);
        let mut phones = random_word(len, inv, rng);
        phones.splice(p..p + c, instantiate(&pattern, inv, rng));
        out.push(Word::new(phones));
    }
    for _ in 0..q.interior_two {
        let len = rng.gen_range(lo.max(2 * c + 2)..=hi);
        let p1 = rng.gen_range(1..=len - 2 * c - 1);
        let p2 = rng.gen_range(p1 + c..=len - c - 1);
        let mut phones = random_word(len, inv, rng);
        phones.splice(p1..p1 + c, instantiate(&pattern, inv, rng));
        phones.splice(p2..p2 + c, instantiate(&pattern, inv, rng));
        out.push(Word::new(phones));
    }
    while out.len() < q.contain {
        let len = rng.gen_range(lo.max(c)..=hi);
        let p = rng.gen_range(0..=len - c);
        let mut phones = random_word(len, inv, rng);
        phones.splice(p..p + c, instantiate(&pattern, inv, rng));
        out.push(Word::new(phones));
    }
    while out.len() < cfg.n_examples {
        let len = rng.gen_range(lo..=hi);
        out.push(Word::new(random_word(len, inv, rng)));
    }
    out.shuffle(rng);
    Ok(out)
}

fn one_rp_ri(cfg: &GenConfig, inv: &Inventory, seed: u64, index: usize) -> Result<PbeTask, GenError> {
    let mut rng = task_rng(seed, index as u64);
    for _ in 0..cfg.retry_budget {
        let law = sample_random_law(cfg, inv, &mut rng);
        let inputs = match sample_inputs_for_law(&law, cfg, inv, &mut rng) {
            Ok(i) => i,
            Err(GenError::InfeasibleQuota(_)) => continue,
            Err(e) => return Err(e),
        };
        let app = apply_to_lexicon(&law, &inputs, inv);
        if !app.any_changed() {
            continue;
        }
        return Ok(PbeTask {
            id: format!("rp-ri-{seed}-{index:05}"),
            condition: Condition::RpRi,
            inputs,
            outputs: app.outputs,
            gold_law: Some(law),
            provenance: Provenance { seed, source: "random".into(), language_pair: None },
        });
    }
    Err(GenError::RetryBudgetExhausted(cfg.retry_budget))
}

/// Generates `count` tasks in parallel; task `i` depends only on `(seed, i)`.
pub fn gen_rp_ri(cfg: &GenConfig, inv: &Inventory, seed: u64, count: usize) -> Result<Vec<PbeTask>, GenError> {
    cfg.validate()?;
    (0..count).into_par_iter().map(|i| one_rp_ri(cfg, inv, seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> &'static Inventory {
        Inventory::default_table()
    }

    #[test]
    fn context_pattern_strips_boundaries() {
        let t = |s: &str| Token::from_symbol(s).unwrap();
        let law = SoundLaw::new(
            vec![
                Predicate::IsNotToken(t("#")),
                Predicate::IsToken(t("@")),
                Predicate::IsToken(t("a")),
                Predicate::IsToken(t("@")),
                Predicate::IsToken(t("#")),
            ],
            vec![2],
            vec![Mapping::Delete],
        )
        .unwrap();
        assert_eq!(context_pattern(&law), vec![Predicate::IsToken(t("a"))]);
    }

    #[test]
    fn sampled_laws_are_well_formed() {
        let cfg = GenConfig::default();
        let mut rng = task_rng(3, 0);
        for _ in 0..2000 {
            let law = sample_random_law(&cfg, inv(), &mut rng);
            let c = context_pattern(&law).len();
            assert!((1..=3).contains(&c));
            assert!(law.change_pos().len() <= c);
            assert_eq!(SoundLaw::new(law.predicates().to_vec(), law.change_pos().to_vec(), law.mappings().to_vec()).unwrap(), law);
        }
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = GenConfig::default();
        let a = gen_rp_ri(&cfg, inv(), 11, 20).unwrap();
        let b = gen_rp_ri(&cfg, inv(), 11, 20).unwrap();
        assert_eq!(a, b);
        for t in &a {
            assert_eq!(t.len(), 50);
            assert!(t.validate(inv()).is_empty());
        }
    }
}
