//! PBE tasks and their JSONL corpus format.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phonology::{Inventory, Word};
use crate::rewrite::{apply_to_lexicon, SoundLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "rp-ri")]
    RpRi,
    #[serde(rename = "rp-li")]
    RpLi,
    #[serde(rename = "rp-pi")]
    RpPi,
    #[serde(rename = "idp-pi")]
    IdpPi,
    /// Single-law tasks unrolled from a gold cascade.
    #[serde(rename = "bench")]
    Bench,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::RpRi => "rp-ri",
            Condition::RpLi => "rp-li",
            Condition::RpPi => "rp-pi",
            Condition::IdpPi => "idp-pi",
            Condition::Bench => "bench",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Condition::RpRi, Condition::RpLi, Condition::RpPi, Condition::IdpPi, Condition::Bench]
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language_pair: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbeTask {
    pub id: String,
    pub condition: Condition,
    pub inputs: Vec<Word>,
    pub outputs: Vec<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_law: Option<SoundLaw>,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskWarning {
    /// Stored output at `index` differs from re-executing the gold law.
    OutputMismatch { index: usize, stored: Word, executed: Word },
    InertGoldLaw,
}

impl fmt::Display for TaskWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskWarning::OutputMismatch { index, stored, executed } => write!(
                f,
                "example {index}: stored output `{}` but the gold law gives `{}`",
                stored.to_spaced(),
                executed.to_spaced()
            ),
            TaskWarning::InertGoldLaw => f.write_str("gold law changes no input"),
        }
    }
}

impl PbeTask {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn language_pair(&self) -> Option<&str> {
        self.provenance.language_pair.as_deref()
    }

    /// Re-executes the gold law and reports disagreements. Nothing is fixed up.
    pub fn validate(&self, inv: &Inventory) -> Vec<TaskWarning> {
        let Some(law) = &self.gold_law else { return Vec::new() };
        let app = apply_to_lexicon(law, &self.inputs, inv);
        let mut out: Vec<TaskWarning> = app
            .outputs
            .into_iter()
            .zip(&self.outputs)
            .enumerate()
            .filter(|(_, (exec, stored))| exec != *stored)
            .map(|(index, (executed, stored))| TaskWarning::OutputMismatch { index, stored: stored.clone(), executed })
            .collect();
        if !app.changed.iter().any(|&c| c) {
            out.push(TaskWarning::InertGoldLaw);
        }
        out
    }
}

pub fn task_to_line(task: &PbeTask) -> String {
    serde_json::to_string(task).expect("tasks always serialize")
}

pub fn task_from_line(line: &str, line_no: usize) -> Result<PbeTask, TaskError> {
    let task: PbeTask =
        serde_json::from_str(line).map_err(|e| TaskError::Schema { line: line_no, message: e.to_string() })?;
    if task.inputs.len() != task.outputs.len() {
        return Err(TaskError::Schema {
            line: line_no,
            message: format!("{} inputs but {} outputs", task.inputs.len(), task.outputs.len()),
        });
    }
    Ok(task)
}

pub fn write_tasks<W: Write>(mut w: W, tasks: &[PbeTask]) -> std::io::Result<()> {
    for t in tasks {
        writeln!(w, "{}", task_to_line(t))?;
    }
    w.flush()
}

/// Reads a JSONL corpus. Blank lines are skipped; line numbers are 1-based.
pub fn read_tasks<R: BufRead>(r: R) -> Result<Vec<PbeTask>, TaskError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(task_from_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn tasks_to_string(tasks: &[PbeTask]) -> String {
    let mut buf = Vec::new();
    write_tasks(&mut buf, tasks).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
