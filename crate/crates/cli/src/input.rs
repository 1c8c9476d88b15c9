//! Reading words, laws and cascades from files or the command line.

use std::ops::Range;
use std::path::Path;

use sli_core::assets;
use sli_core::dsl::classical::CompileError;
use sli_core::dsl::{compile_classical, parse_transcript, read_law, read_laws};
use sli_core::phonology::load_lexicon;
use sli_core::{Inventory, SoundLaw, Word};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
    (line, col)
}

fn at(text: &str, span: &Range<usize>) -> String {
    let (l, c) = line_col(text, span.start);
    format!("{l}:{c}")
}

/// Lexicon text: `builtin:NAME` for bundled data, else a file path.
pub fn lexicon_text(spec: &str) -> Result<String, CliError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => assets::lexicon(name)
            .map(str::to_string)
            .ok_or_else(|| CliError::parse(format!("no bundled lexicon `{name}` (try poc, ptk, nonce, demo)"))),
        None => read_text(Path::new(spec)),
    }
}

pub fn load_words(lexicon: Option<&str>, words: &[String], inv: &Inventory) -> Result<Vec<Word>, CliError> {
    let mut out = Vec::new();
    if let Some(spec) = lexicon {
        let text = lexicon_text(spec)?;
        out = load_lexicon(&text, inv).map_err(|e| CliError::parse(format!("{spec}: {e}")))?;
    }
    for w in words {
        out.push(inv.segment(w).map_err(|e| CliError::parse(format!("`{w}`: {e}")))?);
    }
    Ok(out)
}

fn compile_line(rule: &str, full: &str, line_start: usize, inv: &Inventory) -> Result<SoundLaw, CliError> {
    compile_classical(rule, inv).map_err(|e| {
        let where_ = match &e {
            CompileError::Parse(p) => p.span().map(|s| at(full, &((line_start + s.start)..(line_start + s.end)))),
            CompileError::Lower(_) => None,
        };
        let (l, c) = line_col(full, line_start);
        CliError::parse(format!("{}: {e}", where_.unwrap_or_else(|| format!("{l}:{c}"))))
    })
}

/// Laws from text in any of the accepted notations: law JSON (one document
/// or an array), `BasicAction(...)` constructors, or classical rules one per
/// line (`//` starts a comment).
pub fn parse_laws(text: &str, inv: &Inventory) -> Result<Vec<SoundLaw>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return read_law(text).map(|l| vec![l]).map_err(|e| CliError::parse(e.to_string()));
    }
    if trimmed.starts_with('[') {
        return read_laws(text).map_err(|e| CliError::parse(e.to_string()));
    }
    if text.contains("BasicAction") {
        let set = parse_transcript(text, inv);
        let errors: Vec<String> = set
            .diagnostics
            .iter()
            .filter(|d| d.severity == sli_core::dsl::Severity::Error)
            .map(|d| format!("{}: {}", at(text, &d.span), d.message))
            .collect();
        if !errors.is_empty() {
            return Err(CliError::parse(errors.join("\n")));
        }
        return Ok(set.sound_laws());
    }
    let mut laws = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let rule = line.split("//").next().unwrap_or("");
        if !rule.trim().is_empty() {
            let lead = rule.len() - rule.trim_start().len();
            laws.push(compile_line(rule.trim(), text, offset + lead, inv)?);
        }
        offset += line.len();
    }
    Ok(laws)
}
