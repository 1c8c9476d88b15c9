//! Phones, segment inventories and the token sequences rules match over.
//!
//! A word is segmented into phones by greedy longest match against an
//! explicit inventory, then wrapped as `# @ p1 @ p2 ... @ pn @ #` before any
//! rule sees it. Feature-class predicates (`is_consonant`, `is_velar`, ...)
//! are answered from a PanPhon-compatible feature table.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const BOUNDARY: &str = "#";
pub const SEPARATOR: &str = "@";
/// Deletion sentinel used by the constructor syntax. Never a phone.
pub const DELETE_SENTINEL: &str = "!";

const DEFAULT_TABLE: &str = include_str!("../assets/features.csv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhonologyError {
    #[error("cannot segment {word:?}: no inventory segment matches at character {position}")]
    UnsegmentableInput { word: String, position: usize },
    #[error("token sequence is not canonical: {0}")]
    NonCanonicalTokenSeq(String),
    #[error("unknown feature class `{0}`")]
    UnknownFeatureClass(String),
    #[error("duplicate segment `{0}` in feature table")]
    DuplicateSegment(String),
    #[error("malformed feature table row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("invalid phone symbol {0:?}")]
    InvalidPhone(String),
}

pub type Result<T, E = PhonologyError> = std::result::Result<T, E>;

pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// A single segment such as `a`, `tʰ` or `bʷ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Phone(String);

impl Phone {
    pub fn new(symbol: &str) -> Result<Self> {
        let symbol = nfc(symbol);
        if symbol.is_empty()
            || symbol.chars().any(char::is_whitespace)
            || symbol.contains(BOUNDARY)
            || symbol.contains(SEPARATOR)
            || symbol.contains(DELETE_SENTINEL)
        {
            return Err(PhonologyError::InvalidPhone(symbol));
        }
        Ok(Phone(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Phone {
    type Error = PhonologyError;

    fn try_from(value: String) -> Result<Self> {
        Phone::new(&value)
    }
}

impl From<Phone> for String {
    fn from(p: Phone) -> String {
        p.0
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A segmented word. `Display` concatenates the phones; [`Word::to_spaced`]
/// gives the space-joined interchange form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Phone>);

impl Word {
    pub fn new(phones: Vec<Phone>) -> Self {
        Word(phones)
    }

    pub fn phones(&self) -> &[Phone] {
        &self.0
    }

    pub fn into_phones(self) -> Vec<Phone> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_spaced(&self) -> String {
        let parts: Vec<&str> = self.0.iter().map(Phone::as_str).collect();
        parts.join(" ")
    }

    /// Parses the space-joined form. The empty string is the empty word.
    pub fn from_spaced(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(Phone::new)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Convenience for tests and fixtures: each whitespace-free `&str` is one phone.
    pub fn from_symbols(symbols: &[&str]) -> Result<Self> {
        symbols.iter().map(|s| Phone::new(s)).collect::<Result<Vec<_>>>().map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

impl FromIterator<Phone> for Word {
    fn from_iter<I: IntoIterator<Item = Phone>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_spaced())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::from_spaced(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Boundary,
    Separator,
    Phone(Phone),
}

impl Token {
    pub fn from_symbol(s: &str) -> Result<Self> {
        match s {
            BOUNDARY => Ok(Token::Boundary),
            SEPARATOR => Ok(Token::Separator),
            other => Phone::new(other).map(Token::Phone),
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            Token::Boundary => BOUNDARY,
            Token::Separator => SEPARATOR,
            Token::Phone(p) => p.as_str(),
        }
    }

    pub fn as_phone(&self) -> Option<&Phone> {
        match self {
            Token::Phone(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Canonical token sequence: `# @ p1 @ ... @ pn @ #`. Zero phones give `# @ #`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<Token>);

impl TokenSeq {
    /// Validates canonical form.
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self> {
        check_canonical(&tokens)?;
        Ok(TokenSeq(tokens))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_word(&self) -> Word {
        self.0.iter().filter_map(|t| t.as_phone().cloned()).collect()
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(Token::symbol).collect();
        f.write_str(&parts.join(" "))
    }
}

fn check_canonical(tokens: &[Token]) -> Result<()> {
    let fail = |why: &str| Err(PhonologyError::NonCanonicalTokenSeq(why.to_string()));
    if tokens.len() < 3 || tokens.len().is_multiple_of(2) {
        return fail("length must be odd and at least 3");
    }
    if tokens[0] != Token::Boundary || tokens[tokens.len() - 1] != Token::Boundary {
        return fail("must start and end with '#'");
    }
    for (i, tok) in tokens.iter().enumerate().skip(1).take(tokens.len() - 2) {
        let ok = if i % 2 == 1 {
            *tok == Token::Separator
        } else {
            matches!(tok, Token::Phone(_))
        };
        if !ok {
            return fail(&format!("unexpected token `{tok}` at position {i}"));
        }
    }
    Ok(())
}

pub fn preprocess(word: &Word) -> TokenSeq {
    let mut tokens = Vec::with_capacity(2 * word.len() + 3);
    tokens.push(Token::Boundary);
    tokens.push(Token::Separator);
    for p in word.phones() {
        tokens.push(Token::Phone(p.clone()));
        tokens.push(Token::Separator);
    }
    tokens.push(Token::Boundary);
    TokenSeq(tokens)
}

pub fn render(tokens: &[Token]) -> Result<Word> {
    check_canonical(tokens)?;
    Ok(tokens.iter().filter_map(|t| t.as_phone().cloned()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureValue {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
}

impl FeatureValue {
    fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "+" => Some(FeatureValue::Plus),
            "-" | "−" => Some(FeatureValue::Minus),
            "0" => Some(FeatureValue::Zero),
            _ => None,
        }
    }
}

/// The named feature classes that predicates may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureClass {
    Consonant,
    Vowel,
    Velar,
    LiquidConsonant,
    ContNotSon,
    Son,
    NotBoundary,
    Anything,
    Nothing,
}

impl FeatureClass {
    pub const ALL: [FeatureClass; 9] = [
        FeatureClass::Consonant,
        FeatureClass::Vowel,
        FeatureClass::Velar,
        FeatureClass::LiquidConsonant,
        FeatureClass::ContNotSon,
        FeatureClass::Son,
        FeatureClass::NotBoundary,
        FeatureClass::Anything,
        FeatureClass::Nothing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureClass::Consonant => "is_consonant",
            FeatureClass::Vowel => "is_vowel",
            FeatureClass::Velar => "is_velar",
            FeatureClass::LiquidConsonant => "is_liquid_consonant",
            FeatureClass::ContNotSon => "is_cont_not_son",
            FeatureClass::Son => "is_son",
            FeatureClass::NotBoundary => "is_not_boundary",
            FeatureClass::Anything => "is_anything",
            FeatureClass::Nothing => "is_nothing",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        FeatureClass::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| PhonologyError::UnknownFeatureClass(name.to_string()))
    }

    /// True for classes decided by the feature table (false on `#` and `@`).
    pub fn is_featural(self) -> bool {
        !matches!(
            self,
            FeatureClass::NotBoundary | FeatureClass::Anything | FeatureClass::Nothing
        )
    }
}

impl fmt::Display for FeatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered segment set plus its feature table.
#[derive(Debug, Clone)]
pub struct Inventory {
    features: Vec<String>,
    segments: Vec<Phone>,
    table: HashMap<Phone, Vec<FeatureValue>>,
    max_chars: usize,
}

impl Inventory {
    /// Loads a delimiter-separated feature table. The header names the
    /// features; the first column of every row is the segment symbol.
    /// Tab is used as the delimiter when the header contains one, comma
    /// otherwise.
    pub fn from_table(source: &str) -> Result<Self> {
        let source = source.strip_prefix('\u{feff}').unwrap_or(source);
        let header = source.lines().next().unwrap_or("");
        let delimiter = if header.contains('\t') { b'\t' } else { b',' };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .flexible(true)
            .comment(None)
            .from_reader(source.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| PhonologyError::MalformedRow { line: 1, reason: e.to_string() })?
            .clone();
        if headers.len() < 2 {
            return Err(PhonologyError::MalformedRow {
                line: 1,
                reason: "header must name at least one feature".into(),
            });
        }
        let features: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
        let mut inv = Inventory {
            features,
            segments: Vec::new(),
            table: HashMap::new(),
            max_chars: 0,
        };
        for (idx, record) in reader.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| PhonologyError::MalformedRow { line, reason: e.to_string() })?;
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            if record.len() != inv.features.len() + 1 {
                return Err(PhonologyError::MalformedRow {
                    line,
                    reason: format!("expected {} columns, found {}", inv.features.len() + 1, record.len()),
                });
            }
            let phone = Phone::new(record[0].trim()).map_err(|e| PhonologyError::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            let values = record
                .iter()
                .skip(1)
                .map(|v| {
                    FeatureValue::parse(v).ok_or_else(|| PhonologyError::MalformedRow {
                        line,
                        reason: format!("bad feature value {v:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            inv.insert(phone, values)?;
        }
        Ok(inv)
    }

    /// The bundled table: PanPhon values for every segment used in the
    /// shipped data plus the basic Latin letters.
    pub fn default_table() -> &'static Inventory {
        static INV: OnceLock<Inventory> = OnceLock::new();
        INV.get_or_init(|| Inventory::from_table(DEFAULT_TABLE).expect("bundled feature table is valid"))
    }

    fn insert(&mut self, phone: Phone, values: Vec<FeatureValue>) -> Result<()> {
        if self.table.contains_key(&phone) {
            return Err(PhonologyError::DuplicateSegment(phone.0));
        }
        self.max_chars = self.max_chars.max(phone.as_str().chars().count());
        self.segments.push(phone.clone());
        self.table.insert(phone, values);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[Phone] {
        &self.segments
    }

    pub fn feature_names(&self) -> &[String] {
        &self.features
    }

    pub fn contains(&self, symbol: &str) -> bool {
        Phone::new(symbol).map(|p| self.table.contains_key(&p)).unwrap_or(false)
    }

    pub fn feature(&self, phone: &Phone, name: &str) -> Option<FeatureValue> {
        let idx = self.features.iter().position(|f| f == name)?;
        self.table.get(phone).map(|v| v[idx])
    }

    /// Resolves a single symbol to an inventory phone.
    pub fn phone(&self, symbol: &str) -> Option<Phone> {
        let p = Phone::new(symbol).ok()?;
        self.table.contains_key(&p).then_some(p)
    }

    /// Greedy longest-match segmentation, left to right.
    pub fn segment(&self, word: &str) -> Result<Word> {
        let word = nfc(word);
        let chars: Vec<char> = word.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let longest = (1..=self.max_chars.min(chars.len() - i)).rev().find_map(|len| {
                let candidate: String = chars[i..i + len].iter().collect();
                self.phone(&candidate)
            });
            match longest {
                Some(p) => {
                    i += p.as_str().chars().count();
                    out.push(p);
                }
                None => {
                    return Err(PhonologyError::UnsegmentableInput { word: word.clone(), position: i });
                }
            }
        }
        Ok(Word(out))
    }

    /// Segments text that may already be split by whitespace (`t a` or `ta`).
    pub fn segment_spaced(&self, text: &str) -> Result<Word> {
        let mut phones = Vec::new();
        for piece in text.split_whitespace() {
            phones.extend(self.segment(piece)?.into_phones());
        }
        Ok(Word(phones))
    }

    pub fn in_class(&self, class: FeatureClass, tok: &Token) -> bool {
        match class {
            FeatureClass::Anything => true,
            FeatureClass::Nothing => *tok == Token::Separator,
            FeatureClass::NotBoundary => *tok != Token::Boundary,
            featural => match tok {
                Token::Phone(p) => self.phone_in_class(featural, p),
                _ => false,
            },
        }
    }

    /// Same as [`Inventory::in_class`] but takes a class name.
    pub fn in_class_named(&self, name: &str, tok: &Token) -> Result<bool> {
        Ok(self.in_class(FeatureClass::from_name(name)?, tok))
    }

    fn phone_in_class(&self, class: FeatureClass, p: &Phone) -> bool {
        use FeatureValue::*;
        let Some(values) = self.table.get(p) else {
            return false;
        };
        let get = |name: &str| {
            self.features
                .iter()
                .position(|f| f == name)
                .map(|i| values[i])
                .unwrap_or(Zero)
        };
        let syllabic = get("syl") == Plus;
        match class {
            FeatureClass::Vowel => syllabic,
            FeatureClass::Consonant => !syllabic,
            FeatureClass::Velar => !syllabic && get("hi") == Plus && get("back") == Plus,
            FeatureClass::LiquidConsonant => {
                !syllabic && get("cons") == Plus && get("son") == Plus && get("nas") != Plus
            }
            FeatureClass::ContNotSon => get("cont") == Plus && get("son") == Minus,
            FeatureClass::Son => get("son") == Plus,
            FeatureClass::NotBoundary | FeatureClass::Anything => true,
            FeatureClass::Nothing => false,
        }
    }

    /// Inventory phones belonging to a feature class, in inventory order.
    pub fn class_members(&self, class: FeatureClass) -> Vec<Phone> {
        self.segments
            .iter()
            .filter(|p| self.in_class(class, &Token::Phone((*p).clone())))
            .cloned()
            .collect()
    }
}

/// Reads a lexicon: one word per line, `#`-prefixed lines are comments.
pub fn load_lexicon(text: &str, inv: &Inventory) -> Result<Vec<Word>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| inv.segment_spaced(l))
        .collect()
}
