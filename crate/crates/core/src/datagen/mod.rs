//! Synthetic PBE task generation: random programs over random inputs,
//! model-proposed programs over nonce or protolanguage inputs, and
//! attested rules over protolanguage inputs.

pub mod idp;
pub mod lcs;
pub mod llm;
pub mod random;
pub mod rules;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phonology::{Inventory, Word};
use crate::rewrite::apply_to_lexicon;
use crate::task::PbeTask;

pub use idp::{gen_idp_pi, sample_idp_context};
pub use lcs::lcs;
pub use llm::gen_llm_tasks;
pub use random::{gen_rp_ri, sample_inputs_for_law, sample_random_law, QuotaCounts};
pub use rules::{RuleDb, RuleEntry};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("quota cannot be met: {0}")]
    InfeasibleQuota(String),
    #[error("distractor pool has {available} usable words, {needed} needed")]
    PoolExhausted { needed: usize, available: usize },
    #[error("no pair of inputs shares a subsequence")]
    NoCommonSubsequence,
    #[error("no rule applies to the sampled inputs")]
    NoApplicableRule,
    #[error("no usable program in {rounds} consecutive rounds")]
    ZeroYield { rounds: usize },
    #[error("need at least {needed} words, have {have}")]
    LexiconTooSmall { needed: usize, have: usize },
    #[error("could not produce a task within {0} attempts")]
    RetryBudgetExhausted(usize),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Relative weights of the three predicate shapes for random laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateMix {
    pub literal: f64,
    pub set: f64,
    pub class: f64,
}

impl Default for PredicateMix {
    fn default() -> Self {
        PredicateMix { literal: 0.6, set: 0.2, class: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    /// Examples per task.
    pub n_examples: usize,
    pub context_min: usize,
    pub context_max: usize,
    pub boundary_prob: f64,
    pub word_len_min: usize,
    pub word_len_max: usize,
    pub max_edits: usize,
    pub predicate_mix: PredicateMix,
    pub retry_budget: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_examples: 50,
            context_min: 1,
            context_max: 3,
            boundary_prob: 0.25,
            word_len_min: 3,
            word_len_max: 12,
            max_edits: 3,
            predicate_mix: PredicateMix::default(),
            retry_budget: 20,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.to_string()));
        if self.n_examples < 10 {
            return bad("n_examples must be at least 10");
        }
        if !(0.0..=1.0).contains(&self.boundary_prob) {
            return bad("boundary_prob must lie in [0, 1]");
        }
        if self.context_min == 0 || self.context_min > self.context_max {
            return bad("context range must satisfy 1 <= min <= max");
        }
        if self.word_len_min == 0 || self.word_len_min > self.word_len_max {
            return bad("word length range must satisfy 1 <= min <= max");
        }
        if self.max_edits == 0 {
            return bad("max_edits must be at least 1");
        }
        let m = self.predicate_mix;
        if [m.literal, m.set, m.class].iter().any(|w| *w < 0.0) || m.literal + m.set + m.class <= 0.0 {
            return bad("predicate mix weights must be non-negative and not all zero");
        }
        if self.retry_budget == 0 {
            return bad("retry_budget must be at least 1");
        }
        Ok(())
    }
}

/// Independent stream for item `index` under `seed`; the same item gets the
/// same stream however the work is scheduled.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Pads a task to `target_n` examples with words drawn from `pool`, running
/// the gold law over each added word.
pub fn add_distractors(
    task: &PbeTask,
    pool: &[Word],
    rng: &mut impl rand::Rng,
    target_n: usize,
    inv: &Inventory,
) -> Result<PbeTask, GenError> {
    let have = task.inputs.len();
    if have >= target_n {
        return Ok(task.clone());
    }
    let needed = target_n - have;
    let usable: Vec<&Word> = {
        let mut seen = std::collections::HashSet::new();
        pool.iter().filter(|w| !task.inputs.contains(w) && seen.insert(*w)).collect()
    };
    if usable.len() < needed {
        return Err(GenError::PoolExhausted { needed, available: usable.len() });
    }
    let mut picks = sample(rng, usable.len(), needed).into_vec();
    picks.sort_unstable();
    let added: Vec<Word> = picks.into_iter().map(|i| usable[i].clone()).collect();
    let mut out = task.clone();
    let added_outputs = match &task.gold_law {
        Some(law) => apply_to_lexicon(law, &added, inv).outputs,
        None => added.clone(),
    };
    out.inputs.extend(added);
    out.outputs.extend(added_outputs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile_classical;
    use crate::task::{Condition, Provenance};

    fn inv() -> &'static Inventory {
        Inventory::default_table()
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| inv().segment(w).unwrap()).collect()
    }

    fn task(n: usize) -> PbeTask {
        let law = compile_classical("t > d / _ #", inv()).unwrap();
        let inputs: Vec<Word> = (0..n).map(|i| inv().segment(&format!("{}at", "s".repeat(i + 1))).unwrap()).collect();
        let outputs = apply_to_lexicon(&law, &inputs, inv()).outputs;
        PbeTask {
            id: "x".into(),
            condition: Condition::RpLi,
            inputs,
            outputs,
            gold_law: Some(law),
            provenance: Provenance { seed: 0, source: "unit".into(), language_pair: None },
        }
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        let c = GenConfig { n_examples: 5, ..GenConfig::default() };
        assert!(c.validate().is_err());
        let c = GenConfig { boundary_prob: 1.5, ..GenConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn distractors_pad_and_stay_consistent() {
        let t = task(3);
        let pool = words(&["kap", "lot", "mit", "sunu", "kap", "pa"]);
        let mut rng = task_rng(1, 0);
        let padded = add_distractors(&t, &pool, &mut rng, 6, inv()).unwrap();
        assert_eq!(padded.len(), 6);
        assert!(padded.validate(inv()).is_empty());
        // words the law changes are changed in the output too
        assert!(padded.inputs.iter().zip(&padded.outputs).skip(3).any(|(i, o)| i != o));
        assert_eq!(add_distractors(&t, &pool, &mut rng, 3, inv()).unwrap(), t);
        assert!(matches!(
            add_distractors(&t, &pool, &mut rng, 9, inv()),
            Err(GenError::PoolExhausted { needed: 6, available: 5 })
        ));
    }

    #[test]
    fn streams_are_independent_of_order() {
        use rand::Rng;
        let a: u64 = task_rng(9, 3).gen();
        let _: u64 = task_rng(9, 2).gen();
        let b: u64 = task_rng(9, 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, task_rng(9, 4).gen::<u64>());
    }
}
