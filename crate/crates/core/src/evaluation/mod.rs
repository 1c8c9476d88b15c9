//! Edit-distance reward, reward@m, pass rate and dataset reports.

pub mod distance;
pub mod stats;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::phonology::{Inventory, Word};
use crate::rewrite::{apply_to_lexicon, SoundLaw};
use crate::task::PbeTask;

pub use distance::{levenshtein, word_distance, DistanceMode};
pub use stats::{bonferroni, wilcoxon_signed_rank, Alternative, ComparisonRecord, WilcoxonResult};

/// Exact reward value.
pub type Reward = Ratio<i64>;

/// Default number of sampled programs per task.
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("word vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("source and target are identical, so the reward is undefined")]
    DegenerateTask,
    #[error("need at least {needed} samples, have {have}")]
    NotEnoughSamples { needed: usize, have: usize },
    #[error("m must be at least 1")]
    ZeroM,
    #[error("no tasks to aggregate")]
    EmptyDataset,
    #[error("no candidate programs")]
    NoCandidates,
}

pub fn aggregate_dist(xs: &[Word], ys: &[Word], mode: DistanceMode) -> Result<usize, EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    Ok(xs.iter().zip(ys).map(|(x, y)| word_distance(x, y, mode)).sum())
}

/// `1 - dist(pred, target) / dist(source, target)`, exact.
pub fn reward(source: &[Word], pred: &[Word], target: &[Word], mode: DistanceMode) -> Result<Reward, EvalError> {
    let denom = aggregate_dist(source, target, mode)?;
    let num = aggregate_dist(pred, target, mode)?;
    if denom == 0 {
        return Err(EvalError::DegenerateTask);
    }
    Ok(Reward::from_integer(1) - Reward::new(num as i64, denom as i64))
}

/// Mean of the `m` largest rewards.
pub fn reward_at_m(rewards: &[Reward], m: usize) -> Result<Reward, EvalError> {
    if m == 0 {
        return Err(EvalError::ZeroM);
    }
    if rewards.len() < m {
        return Err(EvalError::NotEnoughSamples { needed: m, have: rewards.len() });
    }
    let mut sorted = rewards.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let sum: Reward = sorted[..m].iter().sum();
    Ok(sum / Reward::from_integer(m as i64))
}

fn ratio_f64(r: &Reward) -> f64 {
    r.to_f64().expect("reward ratios are finite")
}

fn ser_ratio<S: Serializer>(r: &Reward, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_f64(r))
}

fn ser_opt_ratio<S: Serializer>(r: &Option<Reward>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&ratio_f64(r)),
        None => s.serialize_none(),
    }
}

fn ser_ratios<S: Serializer>(rs: &[Reward], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ratio_f64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleScore {
    pub task_id: String,
    pub sample_index: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub reward: Reward,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewardReport {
    pub task_id: String,
    pub group: String,
    /// Descending.
    #[serde(serialize_with = "ser_ratios")]
    pub rewards: Vec<Reward>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub reward_at_1: Option<Reward>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub reward_at_3: Option<Reward>,
    pub passed: bool,
}

impl RewardReport {
    pub fn from_scores(task_id: &str, group: &str, scores: &[SampleScore]) -> Result<Self, EvalError> {
        if scores.is_empty() {
            return Err(EvalError::NoCandidates);
        }
        let mut rewards: Vec<Reward> = scores.iter().map(|s| s.reward).collect();
        rewards.sort_unstable_by(|a, b| b.cmp(a));
        Ok(RewardReport {
            task_id: task_id.to_string(),
            group: group.to_string(),
            reward_at_1: reward_at_m(&rewards, 1).ok(),
            reward_at_3: reward_at_m(&rewards, 3).ok(),
            passed: scores.iter().any(|s| s.passed),
            rewards,
        })
    }
}

/// Reporting group: the language pair if known, else the condition.
pub fn task_group(task: &PbeTask) -> String {
    task.language_pair().map_or_else(|| task.condition.to_string(), str::to_string)
}

/// Scores every candidate against a task. `None` stands for a sample that
/// did not parse; it scores like the unchanged source.
pub fn score_samples(
    task: &PbeTask,
    candidates: &[Option<SoundLaw>],
    inv: &Inventory,
    mode: DistanceMode,
) -> Result<Vec<SampleScore>, EvalError> {
    if candidates.is_empty() {
        return Err(EvalError::NoCandidates);
    }
    candidates
        .iter()
        .enumerate()
        .map(|(i, cand)| {
            let reward = match cand {
                Some(law) => {
                    let pred = apply_to_lexicon(law, &task.inputs, inv).outputs;
                    reward(&task.inputs, &pred, &task.outputs, mode)?
                }
                None => reward(&task.inputs, &task.inputs, &task.outputs, mode)?,
            };
            Ok(SampleScore { task_id: task.id.clone(), sample_index: i, reward, passed: reward == Reward::from_integer(1) })
        })
        .collect()
}

pub fn evaluate_samples(
    task: &PbeTask,
    candidates: &[Option<SoundLaw>],
    inv: &Inventory,
    mode: DistanceMode,
) -> Result<RewardReport, EvalError> {
    let scores = score_samples(task, candidates, inv, mode)?;
    RewardReport::from_scores(&task.id, &task_group(task), &scores)
}

pub fn pass_rate(reports: &[RewardReport]) -> Result<f64, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    Ok(reports.iter().filter(|r| r.passed).count() as f64 / reports.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAggregate {
    pub tasks: usize,
    pub pass_rate: f64,
    pub reward_at_1: Option<f64>,
    pub reward_at_3: Option<f64>,
}

// f64 on purpose: rewards of different tasks have unrelated denominators
fn mean_of(values: impl Iterator<Item = Option<Reward>>) -> Option<f64> {
    mean_f64(values.map(|v| v.as_ref().map(ratio_f64)))
}

impl GroupAggregate {
    pub fn over(reports: &[&RewardReport]) -> Self {
        let n = reports.len();
        GroupAggregate {
            tasks: n,
            pass_rate: if n == 0 { 0.0 } else { reports.iter().filter(|r| r.passed).count() as f64 / n as f64 },
            reward_at_1: mean_of(reports.iter().map(|r| r.reward_at_1)),
            reward_at_3: mean_of(reports.iter().map(|r| r.reward_at_3)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub reward_at_1: Option<f64>,
    pub reward_at_3: Option<f64>,
    pub pass_rate: f64,
    pub per_language_pair: BTreeMap<String, GroupAggregate>,
    /// Plain arithmetic mean of the per-pair figures.
    pub average_over_pairs: GroupAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetReport {
    pub per_task: Vec<RewardReport>,
    pub aggregates: Aggregates,
}

fn mean_f64(v: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = v.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl DatasetReport {
    pub fn new(per_task: Vec<RewardReport>) -> Result<Self, EvalError> {
        let overall = GroupAggregate::over(&per_task.iter().collect::<Vec<_>>());
        if per_task.is_empty() {
            return Err(EvalError::EmptyDataset);
        }
        let mut groups: BTreeMap<String, Vec<&RewardReport>> = BTreeMap::new();
        for r in &per_task {
            groups.entry(r.group.clone()).or_default().push(r);
        }
        let per_language_pair: BTreeMap<String, GroupAggregate> =
            groups.into_iter().map(|(k, v)| (k, GroupAggregate::over(&v))).collect();
        let pairs: Vec<&GroupAggregate> = per_language_pair.values().collect();
        let average_over_pairs = GroupAggregate {
            tasks: overall.tasks,
            pass_rate: pairs.iter().map(|g| g.pass_rate).sum::<f64>() / pairs.len() as f64,
            reward_at_1: mean_f64(pairs.iter().map(|g| g.reward_at_1)),
            reward_at_3: mean_f64(pairs.iter().map(|g| g.reward_at_3)),
        };
        Ok(DatasetReport {
            aggregates: Aggregates {
                reward_at_1: overall.reward_at_1,
                reward_at_3: overall.reward_at_3,
                pass_rate: overall.pass_rate,
                per_language_pair,
                average_over_pairs,
            },
            per_task,
        })
    }

    /// Pass rate (percent), R@1 and R@3 with one column per pair plus `Avg`.
    pub fn to_markdown(&self) -> String {
        let a = &self.aggregates;
        let cols: Vec<(&str, &GroupAggregate)> = a
            .per_language_pair
            .iter()
            .map(|(k, v)| (k.as_str(), v))
            .chain(std::iter::once(("Avg", &a.average_over_pairs)))
            .collect();
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
        let mut out = String::new();
        let header: Vec<&str> = cols.iter().map(|c| c.0).collect();
        let _ = writeln!(out, "| Metric | {} |", header.join(" | "));
        let _ = writeln!(out, "|---|{}", "---|".repeat(cols.len()));
        let row = |name: &str, f: &dyn Fn(&GroupAggregate) -> String| {
            format!("| {name} | {} |\n", cols.iter().map(|c| f(c.1)).collect::<Vec<_>>().join(" | "))
        };
        out.push_str(&row("Pass rate (%)", &|g| format!("{:.2}", 100.0 * g.pass_rate)));
        out.push_str(&row("R@1", &|g| opt(g.reward_at_1)));
        out.push_str(&row("R@3", &|g| opt(g.reward_at_3)));
        out
    }
}

/// Evaluates many tasks in parallel; output order follows `tasks`.
pub fn evaluate_dataset(
    tasks: &[PbeTask],
    candidates: &[Vec<Option<SoundLaw>>],
    inv: &Inventory,
    mode: DistanceMode,
) -> Result<DatasetReport, EvalError> {
    if tasks.len() != candidates.len() {
        return Err(EvalError::LengthMismatch(tasks.len(), candidates.len()));
    }
    let reports = tasks
        .par_iter()
        .zip(candidates.par_iter())
        .map(|(t, c)| evaluate_samples(t, c, inv, mode))
        .collect::<Result<Vec<_>, _>>()?;
    DatasetReport::new(reports)
}
