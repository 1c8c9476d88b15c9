//! Surface syntaxes for sound laws.
//!
//! * [`classical`]: `a > e / _ j`
//! * [`constructor`]: `BasicAction(predicates=[...], change_pos=[...], mapping_fn=[...])`
//! * [`json`]: the structured interchange document
//! * [`blocks`]: fenced-code extraction from model transcripts

pub mod blocks;
pub mod classical;
pub mod constructor;
pub mod json;

use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::phonology::Inventory;
use crate::rewrite::SoundLaw;

pub use blocks::{extract_code_blocks, CodeBlock};
pub use classical::{compile_classical, lower_classical, parse_classical, print_classical, ClassicalRule};
pub use constructor::{parse_program_text, print_constructor};
pub use json::{print_law, read_law, read_laws, SchemaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    UnsupportedConstruct,
    UnresolvableSymbol,
    InvalidLaw,
    ConflictingEdits,
    RedefinitionIgnored,
    OrphanInputs,
    UnclosedFence,
    NestedFence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    /// Byte range in the text that was parsed.
    pub span: Range<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(kind: DiagnosticKind, span: Range<usize>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, kind, span, message: message.into() }
    }

    pub fn warning(kind: DiagnosticKind, span: Range<usize>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, kind, span, message: message.into() }
    }

    fn shifted(mut self, offset: usize) -> Self {
        self.span = self.span.start + offset..self.span.end + offset;
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev} [{}..{}]: {}", self.span.start, self.span.end, self.message)
    }
}

/// One law recovered from program text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLaw {
    pub law: SoundLaw,
    pub span: Range<usize>,
    /// `nonce_inputs = [...]` following the constructor, if any.
    pub inputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedProgramSet {
    pub laws: Vec<ParsedLaw>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedProgramSet {
    pub fn sound_laws(&self) -> Vec<SoundLaw> {
        self.laws.iter().map(|p| p.law.clone()).collect()
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    fn absorb(&mut self, other: ParsedProgramSet, offset: usize) {
        self.laws.extend(other.laws.into_iter().map(|mut l| {
            l.span = l.span.start + offset..l.span.end + offset;
            l
        }));
        self.diagnostics.extend(other.diagnostics.into_iter().map(|d| d.shifted(offset)));
    }
}

/// Extracts code blocks from a transcript and parses every one; spans refer to the transcript.
pub fn parse_transcript(transcript: &str, inv: &Inventory) -> ParsedProgramSet {
    let (blocks, diagnostics) = blocks::extract_blocks(transcript);
    let mut out = ParsedProgramSet { laws: Vec::new(), diagnostics };
    for b in blocks {
        out.absorb(parse_program_text(&b.text, inv), b.offset);
    }
    out
}
