//! Model-proposed programs over nonce-word or protolanguage inputs.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{add_distractors, task_rng, GenConfig, GenError};
use crate::dsl::parse_transcript;
use crate::gateway::{build_datagen_prompt, CompletionRequest, Gateway, TemplateId};
use crate::phonology::{Inventory, Word};
use crate::rewrite::{apply_to_lexicon, SoundLaw};
use crate::task::{Condition, PbeTask, Provenance};

const SEED_WORDS: usize = 5;

fn template_for(kind: Condition) -> Result<TemplateId, GenError> {
    match kind {
        Condition::RpLi => Ok(TemplateId::RpLiDatagen),
        Condition::RpPi => Ok(TemplateId::RpPiDatagen),
        other => Err(GenError::Config(format!("`{other}` tasks are not generated by a model"))),
    }
}

/// The seed words of one generation round. Each round draws from the
/// task's own stream, so fixture builders can replay the same draws.
pub fn round_seed_words(seed_pool: &[Word], rng: &mut impl rand::Rng) -> Vec<Word> {
    seed_pool.choose_multiple(rng, SEED_WORDS).cloned().collect()
}

/// Laws in a transcript paired with the words they are shown on: the
/// transcript's own `nonce_inputs` when given, the seed words otherwise.
/// Laws that change none of their words are dropped.
pub fn usable_programs(content: &str, seeds: &[Word], inv: &Inventory) -> Vec<(SoundLaw, Vec<Word>)> {
    let set = parse_transcript(content, inv);
    for d in &set.diagnostics {
        log::debug!("transcript diagnostic: {d}");
    }
    let mut out = Vec::new();
    for parsed in set.laws {
        let inputs: Vec<Word> = match &parsed.inputs {
            Some(raw) => {
                let mut ws: Vec<Word> = Vec::new();
                for w in raw.iter().filter_map(|r| inv.segment(r).ok()) {
                    if !w.is_empty() && !ws.contains(&w) {
                        ws.push(w);
                    }
                }
                ws
            }
            None => seeds.to_vec(),
        };
        if apply_to_lexicon(&parsed.law, &inputs, inv).any_changed() {
            out.push((parsed.law, inputs));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn one_llm(
    kind: Condition,
    gateway: &Gateway,
    seed_pool: &[Word],
    source: &str,
    cfg: &GenConfig,
    inv: &Inventory,
    seed: u64,
    index: usize,
) -> Result<PbeTask, GenError> {
    let template = template_for(kind)?;
    let mut rng = task_rng(seed, index as u64);
    for _ in 0..cfg.retry_budget {
        let seeds = round_seed_words(seed_pool, &mut rng);
        let prompt = build_datagen_prompt(template, &seeds)?;
        let hash = prompt.hash.clone();
        let req = CompletionRequest::new(&gateway.config, prompt, 1);
        let transcript = gateway.complete(&req)?.remove(0);
        let Some((law, inputs)) = usable_programs(&transcript.content, &seeds, inv).into_iter().next() else {
            log::info!("task {index}: round with prompt {hash} yielded no usable program");
            continue;
        };
        let outputs = apply_to_lexicon(&law, &inputs, inv).outputs;
        let partial = PbeTask {
            id: format!("{kind}-{source}-{seed}-{index:05}"),
            condition: kind,
            inputs,
            outputs,
            gold_law: Some(law),
            provenance: Provenance { seed, source: format!("{source}:{hash}"), language_pair: None },
        };
        return add_distractors(&partial, seed_pool, &mut rng, cfg.n_examples, inv);
    }
    Err(GenError::ZeroYield { rounds: cfg.retry_budget })
}

/// Generates `count` tasks of kind `rp-li` or `rp-pi`. Seed words and
/// distractors both come from `seed_pool`; outputs are always computed here.
#[allow(clippy::too_many_arguments)]
pub fn gen_llm_tasks(
    kind: Condition,
    gateway: &Gateway,
    seed_pool: &[Word],
    source: &str,
    cfg: &GenConfig,
    inv: &Inventory,
    seed: u64,
    count: usize,
) -> Result<Vec<PbeTask>, GenError> {
    cfg.validate()?;
    template_for(kind)?;
    if seed_pool.len() < SEED_WORDS {
        return Err(GenError::LexiconTooSmall { needed: SEED_WORDS, have: seed_pool.len() });
    }
    (0..count)
        .into_par_iter()
        .map(|i| one_llm(kind, gateway, seed_pool, source, cfg, inv, seed, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> &'static Inventory {
        Inventory::default_table()
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| inv().segment(w).unwrap()).collect()
    }

    #[test]
    fn nonce_inputs_take_priority() {
        let text = "```python\naction = BasicAction(predicates=[lambda x: x == 's', lambda x: x == '@', lambda x: x == 'a', lambda x: x == '@', lambda x: x in ['l', 't', 'v']], change_pos=[0], mapping_fn=[lambda x: '!'])\nnonce_inputs = ['neyingersalved', 'savolcomish', 'sataphier']\n```\n";
        let progs = usable_programs(text, &words(&["kap"]), inv());
        assert_eq!(progs.len(), 1);
        let out = apply_to_lexicon(&progs[0].0, &progs[0].1, inv()).outputs;
        assert_eq!(out, words(&["neyingeralved", "avolcomish", "ataphier"]));
    }

    #[test]
    fn inert_and_prose_yield_nothing() {
        assert!(usable_programs("I cannot help with that.", &words(&["kap"]), inv()).is_empty());
        let text = "```python\naction = BasicAction(predicates=[lambda x: x == 'z'], change_pos=[0], mapping_fn=[lambda x: 'a'])\n```";
        assert!(usable_programs(text, &words(&["kap", "tam"]), inv()).is_empty());
    }
}
