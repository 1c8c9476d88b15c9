//! Structured law documents.
//!
//! ```json
//! {"predicates":[{"kind":"is_token","args":["a"]},{"kind":"is_token","args":["@"]},{"kind":"is_token","args":["j"]}],
//!  "change_pos":[0],
//!  "mappings":[{"kind":"replace_with","phones":["e"]}]}
//! ```

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::phonology::{FeatureClass, Phone, Token};
use crate::rewrite::{Mapping, Predicate, SoundLaw};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("law document schema error: {0}")]
pub struct SchemaError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawDoc {
    pub predicates: Vec<PredicateDoc>,
    pub change_pos: Vec<usize>,
    pub mappings: Vec<MappingDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateDoc {
    pub kind: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingDoc {
    pub kind: String,
    #[serde(default)]
    pub phones: Vec<String>,
}

impl From<&SoundLaw> for LawDoc {
    fn from(law: &SoundLaw) -> Self {
        let symbols = |ts: &[Token]| ts.iter().map(|t| t.symbol().to_string()).collect::<Vec<_>>();
        let predicates = law
            .predicates()
            .iter()
            .map(|p| {
                let (kind, args) = match p {
                    Predicate::IsToken(t) => ("is_token", vec![t.symbol().to_string()]),
                    Predicate::IsNotToken(t) => ("is_not_token", vec![t.symbol().to_string()]),
                    Predicate::InSet(ts) => ("in_set", symbols(ts)),
                    Predicate::NotInSet(ts) => ("not_in_set", symbols(ts)),
                    Predicate::FeatureClass(c) => ("feature_class", vec![c.name().to_string()]),
                    Predicate::NegatedFeatureClass(c) => ("negated_feature_class", vec![c.name().to_string()]),
                };
                PredicateDoc { kind: kind.to_string(), args }
            })
            .collect();
        let mappings = law
            .mappings()
            .iter()
            .map(|m| {
                let kind = match m {
                    Mapping::Delete => "delete",
                    Mapping::ReplaceWith(_) => "replace_with",
                    Mapping::InsertBefore(_) => "insert_before",
                    Mapping::InsertAfter(_) => "insert_after",
                };
                MappingDoc {
                    kind: kind.to_string(),
                    phones: m.phones().iter().map(|p| p.to_string()).collect(),
                }
            })
            .collect();
        LawDoc { predicates, change_pos: law.change_pos().to_vec(), mappings }
    }
}

impl TryFrom<LawDoc> for SoundLaw {
    type Error = SchemaError;

    fn try_from(doc: LawDoc) -> Result<Self, SchemaError> {
        let err = |m: String| SchemaError(m);
        let token = |s: &str| Token::from_symbol(s).map_err(|e| err(e.to_string()));
        fn single(p: &PredicateDoc) -> Result<&str, SchemaError> {
            match p.args.as_slice() {
                [one] => Ok(one.as_str()),
                _ => Err(SchemaError(format!("predicate `{}` takes exactly one argument", p.kind))),
            }
        }
        let class = |s: &str| FeatureClass::from_name(s).map_err(|e| err(e.to_string()));
        let predicates = doc
            .predicates
            .iter()
            .map(|p| {
                Ok(match p.kind.as_str() {
                    "is_token" => Predicate::IsToken(token(single(p)?)?),
                    "is_not_token" => Predicate::IsNotToken(token(single(p)?)?),
                    "in_set" => Predicate::InSet(p.args.iter().map(|a| token(a)).collect::<Result<_, _>>()?),
                    "not_in_set" => Predicate::NotInSet(p.args.iter().map(|a| token(a)).collect::<Result<_, _>>()?),
                    "feature_class" => Predicate::FeatureClass(class(single(p)?)?),
                    "negated_feature_class" => Predicate::NegatedFeatureClass(class(single(p)?)?),
                    other => return Err(err(format!("unknown predicate kind `{other}`"))),
                })
            })
            .collect::<Result<Vec<_>, SchemaError>>()?;
        let mappings = doc
            .mappings
            .iter()
            .map(|m| {
                let phones = m
                    .phones
                    .iter()
                    .map(|p| Phone::new(p).map_err(|e| err(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(match m.kind.as_str() {
                    "delete" if phones.is_empty() => Mapping::Delete,
                    "delete" => return Err(err("delete takes no phones".into())),
                    "replace_with" => Mapping::ReplaceWith(phones),
                    "insert_before" => Mapping::InsertBefore(phones),
                    "insert_after" => Mapping::InsertAfter(phones),
                    other => return Err(err(format!("unknown mapping kind `{other}`"))),
                })
            })
            .collect::<Result<Vec<_>, SchemaError>>()?;
        SoundLaw::new(predicates, doc.change_pos, mappings).map_err(|e| err(e.to_string()))
    }
}

impl Serialize for SoundLaw {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LawDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SoundLaw {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = LawDoc::deserialize(deserializer)?;
        SoundLaw::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Canonical compact JSON for a law. Field order is fixed.
pub fn print_law(law: &SoundLaw) -> String {
    serde_json::to_string(&LawDoc::from(law)).expect("law documents always serialize")
}

pub fn read_law(json: &str) -> Result<SoundLaw, SchemaError> {
    let doc: LawDoc = serde_json::from_str(json).map_err(|e| SchemaError(e.to_string()))?;
    SoundLaw::try_from(doc)
}

/// Reads either a single law document or a JSON array of them.
pub fn read_laws(json: &str) -> Result<Vec<SoundLaw>, SchemaError> {
    let value: serde_json::Value = serde_json::from_str(json).map_err(|e| SchemaError(e.to_string()))?;
    match value {
        serde_json::Value::Array(items) => items
            .into_iter()
            .map(|v| {
                let doc: LawDoc = serde_json::from_value(v).map_err(|e| SchemaError(e.to_string()))?;
                SoundLaw::try_from(doc)
            })
            .collect(),
        other => {
            let doc: LawDoc = serde_json::from_value(other).map_err(|e| SchemaError(e.to_string()))?;
            Ok(vec![SoundLaw::try_from(doc)?])
        }
    }
}
