//! Single-law evaluation datasets unrolled from gold cascades.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::task_rng;
use crate::dsl::{compile_classical, read_laws};
use crate::phonology::{Inventory, Word};
use crate::rewrite::{apply_cascade, Cascade};
use crate::task::{Condition, PbeTask, Provenance};

pub use crate::task::{read_tasks, write_tasks, TaskError, TaskWarning};

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("cascade has no laws")]
    EmptyCascade,
    #[error("lexicon has no words")]
    EmptyLexicon,
    #[error("no tasks to summarize")]
    EmptyDataset,
    #[error("distractor fraction {0} is outside [0, 1]")]
    BadFraction(f64),
    #[error("cascade line {line}: {message}")]
    CascadeSyntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub cascade: Cascade,
    pub lexicon: Vec<Word>,
    pub language_pair: String,
    pub distractor_fraction: f64,
    pub distractor_min: usize,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(cascade: Cascade, lexicon: Vec<Word>, language_pair: impl Into<String>, seed: u64) -> Self {
        BenchmarkSpec {
            cascade,
            lexicon,
            language_pair: language_pair.into(),
            distractor_fraction: 0.15,
            distractor_min: 2,
            seed,
        }
    }
}

/// A law that produced no task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedLaw {
    pub index: usize,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleLawDataset {
    pub tasks: Vec<PbeTask>,
    pub skipped: Vec<SkippedLaw>,
}

/// Distractor count for `changed` changed words with `available` unchanged ones.
pub fn distractor_count(changed: usize, available: usize, fraction: f64, min: usize) -> usize {
    let want = ((fraction * changed as f64).ceil() as usize).max(min);
    want.min(available)
}

/// One task per law that changes something: every distinct changed word of
/// the lexicon the law sees, plus a few unchanged distractors.
pub fn build_single_law_dataset(spec: &BenchmarkSpec, inv: &Inventory) -> Result<SingleLawDataset, BenchmarkError> {
    if spec.cascade.is_empty() {
        return Err(BenchmarkError::EmptyCascade);
    }
    if spec.lexicon.is_empty() {
        return Err(BenchmarkError::EmptyLexicon);
    }
    if !(0.0..=1.0).contains(&spec.distractor_fraction) {
        return Err(BenchmarkError::BadFraction(spec.distractor_fraction));
    }
    let trace = apply_cascade(&spec.cascade, &spec.lexicon, inv).map_err(|_| BenchmarkError::EmptyCascade)?;
    let mut tasks = Vec::new();
    let mut skipped = Vec::new();
    for (j, stage) in trace.stages.iter().enumerate() {
        let label = spec.cascade.label(j).map(str::to_string);
        let mut seen = HashSet::new();
        let mut changed: Vec<(Word, Word)> = Vec::new();
        let mut unchanged: Vec<Word> = Vec::new();
        for ((b, a), &c) in stage.before.iter().zip(&stage.after).zip(&stage.changed) {
            if !seen.insert(b.clone()) {
                continue;
            }
            if c {
                changed.push((b.clone(), a.clone()));
            } else {
                unchanged.push(b.clone());
            }
        }
        if changed.is_empty() {
            log::warn!("law {j} ({}) changes no word; no task emitted", label.as_deref().unwrap_or("unlabelled"));
            skipped.push(SkippedLaw { index: j, label });
            continue;
        }
        let k = distractor_count(changed.len(), unchanged.len(), spec.distractor_fraction, spec.distractor_min);
        let mut rng = task_rng(spec.seed, j as u64);
        let mut picks = sample(&mut rng, unchanged.len(), k).into_vec();
        picks.sort_unstable();
        let (mut inputs, mut outputs): (Vec<Word>, Vec<Word>) = changed.into_iter().unzip();
        for i in picks {
            inputs.push(unchanged[i].clone());
            outputs.push(unchanged[i].clone());
        }
        tasks.push(PbeTask {
            id: format!("{}-{:03}", spec.language_pair, j),
            condition: Condition::Bench,
            inputs,
            outputs,
            gold_law: Some(spec.cascade.laws[j].clone()),
            provenance: Provenance {
                seed: spec.seed,
                source: label.unwrap_or_else(|| format!("{} law {j}", spec.cascade.name)),
                language_pair: Some(spec.language_pair.clone()),
            },
        });
    }
    Ok(SingleLawDataset { tasks, skipped })
}

/// Reads a cascade: a JSON array of law documents, or classical rules one
/// per line with `//` comments. A comment on a rule's line becomes its label.
pub fn load_cascade(name: &str, text: &str, inv: &Inventory) -> Result<Cascade, BenchmarkError> {
    if text.trim_start().starts_with('[') {
        let laws = read_laws(text).map_err(|e| BenchmarkError::CascadeSyntax { line: 1, message: e.to_string() })?;
        return Ok(Cascade::new(name, laws));
    }
    let mut laws = Vec::new();
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let (rule, comment) = match raw.find("//") {
            Some(p) => (&raw[..p], Some(raw[p + 2..].trim())),
            None => (raw, None),
        };
        let rule = rule.trim();
        if rule.is_empty() {
            continue;
        }
        let law = compile_classical(rule, inv)
            .map_err(|e| BenchmarkError::CascadeSyntax { line: i + 1, message: e.to_string() })?;
        laws.push(law);
        labels.push(Some(comment.filter(|c| !c.is_empty()).unwrap_or(rule).to_string()));
    }
    Ok(Cascade::with_labels(name, laws, labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub tasks: usize,
    pub min_examples: usize,
    pub max_examples: usize,
    /// Mean of the two middle values when the count is even.
    pub median_examples: f64,
    pub per_language_pair: BTreeMap<String, usize>,
}

pub fn dataset_stats(tasks: &[PbeTask]) -> Result<DatasetStats, BenchmarkError> {
    if tasks.is_empty() {
        return Err(BenchmarkError::EmptyDataset);
    }
    let mut sizes: Vec<usize> = tasks.iter().map(PbeTask::len).collect();
    sizes.sort_unstable();
    let n = sizes.len();
    let median = if n % 2 == 1 { sizes[n / 2] as f64 } else { (sizes[n / 2 - 1] + sizes[n / 2]) as f64 / 2.0 };
    let mut per = BTreeMap::new();
    for t in tasks {
        *per.entry(t.language_pair().unwrap_or("-").to_string()).or_insert(0) += 1;
    }
    Ok(DatasetStats {
        tasks: n,
        min_examples: sizes[0],
        max_examples: sizes[n - 1],
        median_examples: median,
        per_language_pair: per,
    })
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
    fn distractor_arithmetic() {
        assert_eq!(distractor_count(10, 100, 0.15, 2), 2);
        assert_eq!(distractor_count(20, 100, 0.15, 2), 3);
        assert_eq!(distractor_count(20, 1, 0.15, 2), 1);
        assert_eq!(distractor_count(0, 5, 0.15, 0), 0);
    }

    #[test]
    fn table_example() {
        let cascade = load_cascade("demo", "t > d / _ #\n", inv()).unwrap();
        let spec = BenchmarkSpec::new(cascade, words(&["sunt", "tapere"]), "x-y", 1);
        let ds = build_single_law_dataset(&spec, inv()).unwrap();
        assert_eq!(ds.tasks.len(), 1);
        let t = &ds.tasks[0];
        assert_eq!(t.inputs, words(&["sunt", "tapere"]));
        assert_eq!(t.outputs, words(&["sund", "tapere"]));
        assert!(t.validate(inv()).is_empty());
    }

    #[test]
    fn feeding_and_skipping() {
        let text = "a > e / _ #   // final a\nk > g / e _\nz > s\n";
        let cascade = load_cascade("demo", text, inv()).unwrap();
        assert_eq!(cascade.label(0), Some("final a"));
        let spec = BenchmarkSpec::new(cascade, words(&["paka", "toka", "mi", "lu", "sa"]), "x-y", 3);
        let ds = build_single_law_dataset(&spec, inv()).unwrap();
        assert_eq!(ds.tasks.len(), 1);
        assert_eq!(ds.skipped.len(), 2);
        let ds2 = build_single_law_dataset(
            &BenchmarkSpec::new(load_cascade("d", "a > e / k _\nk > g / _ e\n", inv()).unwrap(), words(&["paka", "mi", "lu"]), "x-y", 3),
            inv(),
        )
        .unwrap();
        assert_eq!(ds2.tasks.len(), 2);
        assert!(ds2.tasks[1].inputs.contains(&inv().segment("pake").unwrap()));
        assert_eq!(ds2.tasks[1].outputs[0], inv().segment("page").unwrap());
    }

    #[test]
    fn stats() {
        let mk = |n: usize| PbeTask {
            id: n.to_string(),
            condition: Condition::Bench,
            inputs: vec![Word::default(); n],
            outputs: vec![Word::default(); n],
            gold_law: None,
            provenance: Provenance { seed: 0, source: "s".into(), language_pair: Some("p".into()) },
        };
        let s = dataset_stats(&[mk(48), mk(11), mk(16)]).unwrap();
        assert_eq!((s.min_examples, s.max_examples, s.median_examples), (11, 48, 16.0));
        let s = dataset_stats(&[mk(12)]).unwrap();
        assert_eq!((s.min_examples, s.max_examples, s.median_examples), (12, 12, 12.0));
        assert_eq!(dataset_stats(&[mk(10), mk(13)]).unwrap().median_examples, 11.5);
        assert!(dataset_stats(&[]).is_err());
    }
}
