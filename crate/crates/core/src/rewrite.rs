//! Sound laws and their application.
//!
//! A law is a window of predicates matched against the canonical token
//! sequence, plus edits at chosen window slots. Application is two-stage:
//! every match site is located on the original sequence first, then all
//! edits are materialized in a single pass. A rule therefore never fires on
//! material it introduced itself.
//!
//! When two sites register an edit at the same absolute index, the edit from
//! the leftmost site is kept and the others are dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::phonology::{preprocess, FeatureClass, Inventory, Phone, Token, TokenSeq, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("a law needs at least one predicate")]
    EmptyPredicates,
    #[error("change position {pos} is outside a window of {len} predicates")]
    ChangePosOutOfRange { pos: usize, len: usize },
    #[error("change positions must be strictly increasing")]
    ChangePosNotIncreasing,
    #[error("{change_pos} change positions but {mappings} mappings")]
    MappingCountMismatch { change_pos: usize, mappings: usize },
    #[error("change position {0} targets a slot that can only match '#' or '@'")]
    NonPhoneSlot(usize),
    #[error("replacement and insertion sequences must be non-empty")]
    EmptyMappingSequence,
    #[error("set predicates must list at least one symbol")]
    EmptySet,
    #[error("a law needs at least one change position")]
    NoChanges,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("cannot execute an empty cascade")]
    EmptyCascade,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    IsToken(Token),
    IsNotToken(Token),
    InSet(Vec<Token>),
    NotInSet(Vec<Token>),
    FeatureClass(FeatureClass),
    NegatedFeatureClass(FeatureClass),
}

impl Predicate {
    pub fn matches(&self, tok: &Token, inv: &Inventory) -> bool {
        match self {
            Predicate::IsToken(t) => t == tok,
            Predicate::IsNotToken(t) => t != tok,
            Predicate::InSet(ts) => ts.contains(tok),
            Predicate::NotInSet(ts) => !ts.contains(tok),
            Predicate::FeatureClass(c) => inv.in_class(*c, tok),
            Predicate::NegatedFeatureClass(c) => !inv.in_class(*c, tok),
        }
    }

    /// Whether some phone token could satisfy this predicate.
    pub fn can_match_phone(&self) -> bool {
        match self {
            Predicate::IsToken(t) => matches!(t, Token::Phone(_)),
            Predicate::InSet(ts) => ts.iter().any(|t| matches!(t, Token::Phone(_))),
            Predicate::IsNotToken(_) | Predicate::NotInSet(_) => true,
            Predicate::FeatureClass(c) => *c != FeatureClass::Nothing,
            Predicate::NegatedFeatureClass(c) => {
                !matches!(c, FeatureClass::Anything | FeatureClass::NotBoundary)
            }
        }
    }

    /// Literal phones named by the predicate (not class members).
    pub fn literal_phones(&self) -> Vec<&Phone> {
        match self {
            Predicate::IsToken(t) => t.as_phone().into_iter().collect(),
            Predicate::InSet(ts) => ts.iter().filter_map(Token::as_phone).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mapping {
    Delete,
    ReplaceWith(Vec<Phone>),
    InsertBefore(Vec<Phone>),
    InsertAfter(Vec<Phone>),
}

impl Mapping {
    pub fn phones(&self) -> &[Phone] {
        match self {
            Mapping::Delete => &[],
            Mapping::ReplaceWith(p) | Mapping::InsertBefore(p) | Mapping::InsertAfter(p) => p,
        }
    }
}

/// A single sound law: predicate window, change positions and mappings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SoundLaw {
    predicates: Vec<Predicate>,
    change_pos: Vec<usize>,
    mappings: Vec<Mapping>,
}

impl SoundLaw {
    pub fn new(predicates: Vec<Predicate>, change_pos: Vec<usize>, mappings: Vec<Mapping>) -> Result<Self, LawError> {
        if predicates.is_empty() {
            return Err(LawError::EmptyPredicates);
        }
        if change_pos.is_empty() {
            return Err(LawError::NoChanges);
        }
        if change_pos.len() != mappings.len() {
            return Err(LawError::MappingCountMismatch { change_pos: change_pos.len(), mappings: mappings.len() });
        }
        if change_pos.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LawError::ChangePosNotIncreasing);
        }
        for p in &predicates {
            if let Predicate::InSet(ts) | Predicate::NotInSet(ts) = p {
                if ts.is_empty() {
                    return Err(LawError::EmptySet);
                }
            }
        }
        for (&pos, m) in change_pos.iter().zip(&mappings) {
            if pos >= predicates.len() {
                return Err(LawError::ChangePosOutOfRange { pos, len: predicates.len() });
            }
            if !predicates[pos].can_match_phone() {
                return Err(LawError::NonPhoneSlot(pos));
            }
            if !matches!(m, Mapping::Delete) && m.phones().is_empty() {
                return Err(LawError::EmptyMappingSequence);
            }
        }
        Ok(SoundLaw { predicates, change_pos, mappings })
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn change_pos(&self) -> &[usize] {
        &self.change_pos
    }

    pub fn mappings(&self) -> &[Mapping] {
        &self.mappings
    }

    pub fn window_len(&self) -> usize {
        self.predicates.len()
    }

    pub fn edits(&self) -> impl Iterator<Item = (usize, &Mapping)> {
        self.change_pos.iter().copied().zip(&self.mappings)
    }
}

/// Start index of a window match inside a token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchSite {
    pub start: usize,
    pub len: usize,
}

pub fn find_matches(law: &SoundLaw, tokens: &TokenSeq, inv: &Inventory) -> Vec<MatchSite> {
    let toks = tokens.tokens();
    let len = law.window_len();
    if len > toks.len() {
        return Vec::new();
    }
    (0..=toks.len() - len)
        .filter(|&i| law.predicates.iter().zip(&toks[i..i + len]).all(|(p, t)| p.matches(t, inv)))
        .map(|start| MatchSite { start, len })
        .collect()
}

/// Applies one law to a canonical sequence.
///
/// Edits on a phone behave as named. Permissive predicates (`is_anything`,
/// `x != '#'`) can also put an edit on a separator or boundary; there the
/// replacement/insertion phones are inserted at that gap and a deletion is
/// a no-op, so the output keeps both boundaries.
pub fn apply_law(law: &SoundLaw, tokens: &TokenSeq, inv: &Inventory) -> TokenSeq {
    let sites = find_matches(law, tokens, inv);
    if sites.is_empty() {
        return tokens.clone();
    }
    let mut edits: BTreeMap<usize, &Mapping> = BTreeMap::new();
    for site in &sites {
        for (pos, mapping) in law.edits() {
            // leftmost site wins
            edits.entry(site.start + pos).or_insert(mapping);
        }
    }

    let mut phones: Vec<Phone> = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.tokens().iter().enumerate() {
        let edit = edits.get(&i);
        match (tok, edit) {
            (Token::Phone(p), None) => phones.push(p.clone()),
            (Token::Phone(_), Some(Mapping::Delete)) => {}
            (Token::Phone(_), Some(Mapping::ReplaceWith(seq))) => phones.extend(seq.iter().cloned()),
            (Token::Phone(p), Some(Mapping::InsertBefore(seq))) => {
                phones.extend(seq.iter().cloned());
                phones.push(p.clone());
            }
            (Token::Phone(p), Some(Mapping::InsertAfter(seq))) => {
                phones.push(p.clone());
                phones.extend(seq.iter().cloned());
            }
            (_, None) | (_, Some(Mapping::Delete)) => {}
            (_, Some(m)) => phones.extend(m.phones().iter().cloned()),
        }
    }
    preprocess(&Word::new(phones))
}

pub fn apply_word(law: &SoundLaw, word: &Word, inv: &Inventory) -> Word {
    apply_law(law, &preprocess(word), inv).to_word()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconApplication {
    pub outputs: Vec<Word>,
    pub changed: Vec<bool>,
}

impl LexiconApplication {
    pub fn any_changed(&self) -> bool {
        self.changed.iter().any(|&c| c)
    }

    pub fn changed_count(&self) -> usize {
        self.changed.iter().filter(|&&c| c).count()
    }
}

pub fn apply_to_lexicon(law: &SoundLaw, words: &[Word], inv: &Inventory) -> LexiconApplication {
    let outputs: Vec<Word> = words.iter().map(|w| apply_word(law, w, inv)).collect();
    let changed = outputs.iter().zip(words).map(|(o, w)| o != w).collect();
    LexiconApplication { outputs, changed }
}

pub fn law_is_inert(law: &SoundLaw, words: &[Word], inv: &Inventory) -> bool {
    words.iter().all(|w| apply_word(law, w, inv) == *w)
}

/// An ordered sequence of laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub name: String,
    pub laws: Vec<SoundLaw>,
    pub labels: Vec<Option<String>>,
}

impl Cascade {
    pub fn new(name: impl Into<String>, laws: Vec<SoundLaw>) -> Self {
        let labels = vec![None; laws.len()];
        Cascade { name: name.into(), laws, labels }
    }

    pub fn with_labels(name: impl Into<String>, laws: Vec<SoundLaw>, labels: Vec<Option<String>>) -> Self {
        assert_eq!(laws.len(), labels.len(), "one label slot per law");
        Cascade { name: name.into(), laws, labels }
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn label(&self, j: usize) -> Option<&str> {
        self.labels.get(j).and_then(|l| l.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub before: Vec<Word>,
    pub after: Vec<Word>,
    pub changed: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub stages: Vec<Stage>,
}

impl DerivationTrace {
    pub fn final_state(&self) -> &[Word] {
        self.stages.last().map(|s| s.after.as_slice()).unwrap_or(&[])
    }
}

pub fn apply_cascade(cascade: &Cascade, words: &[Word], inv: &Inventory) -> Result<DerivationTrace, RewriteError> {
    if cascade.is_empty() {
        return Err(RewriteError::EmptyCascade);
    }
    let mut current = words.to_vec();
    let mut stages = Vec::with_capacity(cascade.len());
    for law in &cascade.laws {
        let LexiconApplication { outputs, changed } = apply_to_lexicon(law, &current, inv);
        stages.push(Stage { before: std::mem::replace(&mut current, outputs.clone()), after: outputs, changed });
    }
    Ok(DerivationTrace { stages })
}
