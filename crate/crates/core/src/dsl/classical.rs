//! Classical rewrite notation: `FOCUS > TARGET [/ LEFT _ RIGHT]`.
//!
//! `∅` (or `Ø`, `0`) marks an empty focus (insertion) or empty target
//! (deletion). Contexts are sequences of literal segments, `{a,b}` sets,
//! `#` boundaries and the class letters `C` and `V`. Whitespace is
//! insignificant except as a separator between literal runs.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::phonology::{FeatureClass, Inventory, Phone, Token};
use crate::rewrite::{LawError, Mapping, Predicate, SoundLaw};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassicalError {
    #[error("syntax error at {}..{}: {message}", span.start, span.end)]
    SyntaxError { span: Range<usize>, message: String },
    #[error("rule has neither focus nor target")]
    EmptyRule,
}

impl ClassicalError {
    fn syntax(span: Range<usize>, message: impl Into<String>) -> Self {
        ClassicalError::SyntaxError { span, message: message.into() }
    }

    pub fn span(&self) -> Option<Range<usize>> {
        match self {
            ClassicalError::SyntaxError { span, .. } => Some(span.clone()),
            ClassicalError::EmptyRule => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LowerError {
    #[error("`{0}` does not resolve against the inventory")]
    UnresolvableSymbol(String),
    #[error("insertion has no phone slot to anchor on")]
    AmbiguousInsertionAnchor,
    #[error(transparent)]
    Law(#[from] LawError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLetter {
    C,
    V,
}

impl ClassLetter {
    pub fn feature_class(self) -> FeatureClass {
        match self {
            ClassLetter::C => FeatureClass::Consonant,
            ClassLetter::V => FeatureClass::Vowel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContextAtom {
    /// A run of one or more segments written without spaces, e.g. `ak`.
    Segments(String),
    Set(Vec<String>),
    Boundary,
    Class(ClassLetter),
}

impl fmt::Display for ContextAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextAtom::Segments(s) => f.write_str(s),
            ContextAtom::Set(items) => write!(f, "{{{}}}", items.join(",")),
            ContextAtom::Boundary => f.write_str("#"),
            ContextAtom::Class(ClassLetter::C) => f.write_str("C"),
            ContextAtom::Class(ClassLetter::V) => f.write_str("V"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalRule {
    /// Space-separated segment runs; empty means `∅`.
    pub focus: Vec<String>,
    pub target: Vec<String>,
    pub left: Vec<ContextAtom>,
    pub right: Vec<ContextAtom>,
}

impl ClassicalRule {
    pub fn is_insertion(&self) -> bool {
        self.focus.is_empty()
    }

    pub fn is_deletion(&self) -> bool {
        self.target.is_empty()
    }

    /// Segment runs and set members named in focus and contexts (not the target).
    pub fn environment_symbols(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.focus.iter().map(String::as_str).collect();
        for atom in self.left.iter().chain(&self.right) {
            match atom {
                ContextAtom::Segments(s) => out.push(s),
                ContextAtom::Set(items) => out.extend(items.iter().map(String::as_str)),
                _ => {}
            }
        }
        out
    }
}

impl fmt::Display for ClassicalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[String]| if v.is_empty() { "∅".to_string() } else { v.join(" ") };
        write!(f, "{} > {}", side(&self.focus), side(&self.target))?;
        if !self.left.is_empty() || !self.right.is_empty() {
            let atoms = |v: &[ContextAtom]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
            let (l, r) = (atoms(&self.left), atoms(&self.right));
            f.write_str(" /")?;
            if !l.is_empty() {
                write!(f, " {l}")?;
            }
            f.write_str(" _")?;
            if !r.is_empty() {
                write!(f, " {r}")?;
            }
        }
        Ok(())
    }
}

pub fn print_classical(rule: &ClassicalRule) -> String {
    rule.to_string()
}

const EMPTY_MARKS: [&str; 3] = ["∅", "Ø", "0"];

fn is_special(c: char) -> bool {
    matches!(c, '>' | '→' | '/' | '_' | '#' | '{' | '}' | ',')
}

/// Splits `text[range]` into whitespace-separated runs, rejecting specials.
fn parse_side(text: &str, range: Range<usize>, what: &str) -> Result<Vec<String>, ClassicalError> {
    let slice = &text[range.clone()];
    if let Some((i, c)) = slice.char_indices().find(|&(_, c)| is_special(c)) {
        let at = range.start + i;
        return Err(ClassicalError::syntax(at..at + c.len_utf8(), format!("unexpected `{c}` in {what}")));
    }
    let runs: Vec<String> = slice.split_whitespace().map(crate::phonology::nfc).collect();
    if runs.is_empty() {
        return Err(ClassicalError::syntax(range, format!("missing {what}; write ∅ for empty")));
    }
    if runs.len() == 1 && EMPTY_MARKS.contains(&runs[0].as_str()) {
        return Ok(Vec::new());
    }
    if let Some(bad) = runs.iter().find(|r| EMPTY_MARKS.contains(&r.as_str())) {
        let at = range.start + slice.find(bad.as_str()).unwrap_or(0);
        return Err(ClassicalError::syntax(at..at + bad.len(), "∅ cannot be combined with segments"));
    }
    Ok(runs)
}

fn parse_context(text: &str, range: Range<usize>, is_left: bool) -> Result<Vec<ContextAtom>, ClassicalError> {
    let base = range.start;
    let slice = &text[range];
    let mut atoms = Vec::new();
    let mut spans = Vec::new();
    let mut chars = slice.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let at = base + i;
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            chars.next();
            atoms.push(ContextAtom::Boundary);
            spans.push(at..at + 1);
        } else if c == '{' {
            chars.next();
            let mut body = String::new();
            let mut closed = None;
            for (j, d) in chars.by_ref() {
                if d == '}' {
                    closed = Some(base + j);
                    break;
                }
                body.push(d);
            }
            let Some(end) = closed else {
                return Err(ClassicalError::syntax(at..base + slice.len(), "unclosed `{`"));
            };
            let items: Vec<String> = body.split(',').map(|s| crate::phonology::nfc(s.trim())).collect();
            if items.iter().any(|s| s.is_empty() || s.chars().any(is_special) || s.chars().any(char::is_whitespace)) {
                return Err(ClassicalError::syntax(at..end + 1, "set members must be non-empty segments"));
            }
            atoms.push(ContextAtom::Set(items));
            spans.push(at..end + 1);
        } else if c == 'C' || c == 'V' {
            chars.next();
            atoms.push(ContextAtom::Class(if c == 'C' { ClassLetter::C } else { ClassLetter::V }));
            spans.push(at..at + 1);
        } else if c.is_ascii_uppercase() {
            return Err(ClassicalError::syntax(at..at + 1, format!("unknown class letter `{c}` (only C and V)")));
        } else if is_special(c) {
            return Err(ClassicalError::syntax(at..at + c.len_utf8(), format!("unexpected `{c}` in context")));
        } else {
            let mut run = String::new();
            let mut end = at;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || is_special(d) || d == 'C' || d == 'V' || d.is_ascii_uppercase() {
                    break;
                }
                run.push(d);
                end = base + j + d.len_utf8();
                chars.next();
            }
            atoms.push(ContextAtom::Segments(crate::phonology::nfc(&run)));
            spans.push(at..end);
        }
    }
    for (k, atom) in atoms.iter().enumerate() {
        let edge = if is_left { 0 } else { atoms.len() - 1 };
        if *atom == ContextAtom::Boundary && k != edge {
            return Err(ClassicalError::syntax(spans[k].clone(), "`#` may only appear at the outer edge of a context"));
        }
    }
    Ok(atoms)
}

pub fn parse_classical(text: &str) -> Result<ClassicalRule, ClassicalError> {
    let arrow = text
        .char_indices()
        .find(|&(_, c)| c == '>' || c == '→')
        .ok_or_else(|| ClassicalError::syntax(0..text.len(), "expected `>`"))?;
    let after_arrow = arrow.0 + arrow.1.len_utf8();
    if let Some(i) = text[after_arrow..].find(['>', '→']) {
        let at = after_arrow + i;
        return Err(ClassicalError::syntax(at..at + 1, "more than one `>`"));
    }
    let slash = text[after_arrow..].find('/').map(|i| after_arrow + i);
    let target_end = slash.unwrap_or(text.len());
    let focus = parse_side(text, 0..arrow.0, "focus")?;
    let target = parse_side(text, after_arrow..target_end, "target")?;
    if focus.is_empty() && target.is_empty() {
        return Err(ClassicalError::EmptyRule);
    }
    let (left, right) = match slash {
        None => (Vec::new(), Vec::new()),
        Some(s) => {
            let env = s + 1..text.len();
            if let Some(i) = text[env.clone()].find('/') {
                let at = env.start + i;
                return Err(ClassicalError::syntax(at..at + 1, "more than one `/`"));
            }
            let underscores: Vec<usize> = text[env.clone()].match_indices('_').map(|(i, _)| env.start + i).collect();
            match underscores.as_slice() {
                [u] => (parse_context(text, env.start..*u, true)?, parse_context(text, u + 1..env.end, false)?),
                [] => return Err(ClassicalError::syntax(env, "environment needs a `_` focus marker")),
                [_, second, ..] => return Err(ClassicalError::syntax(*second..second + 1, "more than one `_`")),
            }
        }
    };
    Ok(ClassicalRule { focus, target, left, right })
}

fn resolve_runs(runs: &[String], inv: &Inventory) -> Result<Vec<Phone>, LowerError> {
    let mut out = Vec::new();
    for r in runs {
        let word = inv.segment(r).map_err(|_| LowerError::UnresolvableSymbol(r.clone()))?;
        out.extend(word.into_phones());
    }
    Ok(out)
}

fn atom_slots(atom: &ContextAtom, inv: &Inventory) -> Result<Vec<Predicate>, LowerError> {
    Ok(match atom {
        ContextAtom::Boundary => vec![Predicate::IsToken(Token::Boundary)],
        ContextAtom::Class(c) => vec![Predicate::FeatureClass(c.feature_class())],
        ContextAtom::Segments(s) => resolve_runs(std::slice::from_ref(s), inv)?
            .into_iter()
            .map(|p| Predicate::IsToken(Token::Phone(p)))
            .collect(),
        ContextAtom::Set(items) => {
            let members = items
                .iter()
                .map(|i| inv.phone(i).map(Token::Phone).ok_or_else(|| LowerError::UnresolvableSymbol(i.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            vec![Predicate::InSet(members)]
        }
    })
}

/// Lowers a classical rule to a predicate window over the `@`-interleaved sequence.
pub fn lower_classical(rule: &ClassicalRule, inv: &Inventory) -> Result<SoundLaw, LowerError> {
    let mut left = Vec::new();
    for a in &rule.left {
        left.extend(atom_slots(a, inv)?);
    }
    let mut right = Vec::new();
    for a in &rule.right {
        right.extend(atom_slots(a, inv)?);
    }
    let focus = resolve_runs(&rule.focus, inv)?;
    let target = resolve_runs(&rule.target, inv)?;
    let is_boundary = |p: &Predicate| *p == Predicate::IsToken(Token::Boundary);
    let not_boundary = Predicate::IsNotToken(Token::Boundary);

    // slots in order plus (slot index, mapping) edits
    let (slots, edits): (Vec<Predicate>, Vec<(usize, Mapping)>) = if focus.is_empty() {
        let left_anchor = left.last().is_some_and(|p| !is_boundary(p));
        let right_anchor = right.first().is_some_and(|p| !is_boundary(p));
        let n_left = left.len();
        if left_anchor {
            let slots = left.into_iter().chain(right).collect();
            (slots, vec![(n_left - 1, Mapping::InsertAfter(target))])
        } else if right_anchor {
            let slots = left.into_iter().chain(right).collect();
            (slots, vec![(n_left, Mapping::InsertBefore(target))])
        } else if !left.is_empty() && right.is_empty() {
            // word-initial insertion: anchor on the first phone
            let mut slots = left;
            slots.push(not_boundary);
            (slots, vec![(n_left, Mapping::InsertBefore(target))])
        } else if left.is_empty() && !right.is_empty() {
            let mut slots = vec![not_boundary];
            slots.extend(right);
            (slots, vec![(0, Mapping::InsertAfter(target))])
        } else {
            return Err(LowerError::AmbiguousInsertionAnchor);
        }
    } else {
        let n_left = left.len();
        let n_focus = focus.len();
        let slots = left
            .into_iter()
            .chain(focus.into_iter().map(|p| Predicate::IsToken(Token::Phone(p))))
            .chain(right)
            .collect();
        let mut edits = Vec::with_capacity(n_focus);
        for k in 0..n_focus {
            let m = if k == 0 && !target.is_empty() {
                Mapping::ReplaceWith(target.clone())
            } else {
                Mapping::Delete
            };
            edits.push((n_left + k, m));
        }
        (slots, edits)
    };

    let mut predicates = Vec::with_capacity(slots.len() * 2);
    for (i, slot) in slots.into_iter().enumerate() {
        if i > 0 {
            predicates.push(Predicate::IsToken(Token::Separator));
        }
        predicates.push(slot);
    }
    let (change_pos, mappings) = edits.into_iter().map(|(slot, m)| (2 * slot, m)).unzip();
    Ok(SoundLaw::new(predicates, change_pos, mappings)?)
}

/// Parses and lowers in one step.
pub fn compile_classical(text: &str, inv: &Inventory) -> Result<SoundLaw, CompileError> {
    let rule = parse_classical(text)?;
    Ok(lower_classical(&rule, inv)?)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error(transparent)]
    Parse(#[from] ClassicalError),
    #[error(transparent)]
    Lower(#[from] LowerError),
}
