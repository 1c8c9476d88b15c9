//! Rule database in classical notation.
//!
//! One rule per line, optionally followed by tab-separated family and
//! language-pair columns. Lines starting with `//` or `;` are comments.

use serde::Serialize;

use crate::dsl::classical::{lower_classical, parse_classical, ClassicalRule};
use crate::phonology::Inventory;
use crate::rewrite::SoundLaw;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleEntry {
    pub text: String,
    pub rule: ClassicalRule,
    pub law: SoundLaw,
    pub family: Option<String>,
    pub language_pair: Option<String>,
    pub line: usize,
}

/// A line that could not be used, reported at load time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadWarning {
    pub line: usize,
    pub text: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleDb {
    pub rules: Vec<RuleEntry>,
}

fn is_comment(line: &str) -> bool {
    line.starts_with("//") || line.starts_with(';')
}

impl RuleDb {
    /// Loads every rule that parses and lowers; the rest are returned as warnings.
    pub fn load(text: &str, inv: &Inventory) -> (RuleDb, Vec<LoadWarning>) {
        let mut rules = Vec::new();
        let mut warnings = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || is_comment(raw.trim_start()) {
                continue;
            }
            let mut cols = raw.split('\t');
            let rule_text = cols.next().unwrap_or_default().trim().to_string();
            let col = |c: Option<&str>| c.map(str::trim).filter(|s| !s.is_empty()).map(str::to_string);
            let family = col(cols.next());
            let language_pair = col(cols.next());
            let warn = |message: String| LoadWarning { line, text: rule_text.clone(), message };
            let rule = match parse_classical(&rule_text) {
                Ok(r) => r,
                Err(e) => {
                    warnings.push(warn(e.to_string()));
                    continue;
                }
            };
            match lower_classical(&rule, inv) {
                Ok(law) => rules.push(RuleEntry { text: rule_text.clone(), rule, law, family, language_pair, line }),
                Err(e) => warnings.push(warn(e.to_string())),
            }
        }
        (RuleDb { rules }, warnings)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_columns_and_flags_bad_lines() {
        let text = "// demo\nu > o / _ C\tAustronesian\tpoc-x\n\nt > d / _ #\nq >\nʘ > a\n";
        let (db, warnings) = RuleDb::load(text, Inventory::default_table());
        assert_eq!(db.len(), 2);
        assert_eq!(db.rules[0].family.as_deref(), Some("Austronesian"));
        assert_eq!(db.rules[0].language_pair.as_deref(), Some("poc-x"));
        assert_eq!(db.rules[1].family, None);
        assert_eq!(warnings.iter().map(|w| w.line).collect::<Vec<_>>(), vec![5, 6]);
    }
}
