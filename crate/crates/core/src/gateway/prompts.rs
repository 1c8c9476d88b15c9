//! Prompt templates and rendering.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GatewayError;
use crate::dsl::constructor::quote;
use crate::phonology::{preprocess, Word};
use crate::task::PbeTask;

const DESCRIPTION: &str = include_str!("../../assets/prompts/basic_action_description.txt");
const DEMONSTRATIONS: &str = include_str!("../../assets/prompts/sli_demonstrations.txt");
const SOURCE: &str = include_str!("../../assets/prompts/basic_action.py");
const INSTRUCTIONS: &str = include_str!("../../assets/prompts/sli_instructions.txt");
pub const RP_LI_TEMPLATE: &str = include_str!("../../assets/prompts/rp_li_datagen.txt");
pub const RP_PI_TEMPLATE: &str = include_str!("../../assets/prompts/rp_pi_datagen.txt");

/// Headings of the six SLI prompt sections, in order.
pub const SECTION_MARKERS: [&str; 6] = [
    "## Task",
    "## BasicAction",
    "## Words",
    "## Examples",
    "## Source",
    "## Instructions",
];

const SEED_WORDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateId {
    #[serde(rename = "sli-single-law")]
    SliSingleLaw,
    #[serde(rename = "rp-li-datagen")]
    RpLiDatagen,
    #[serde(rename = "rp-pi-datagen")]
    RpPiDatagen,
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateId::SliSingleLaw => "sli-single-law",
            TemplateId::RpLiDatagen => "rp-li-datagen",
            TemplateId::RpPiDatagen => "rp-pi-datagen",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptBundle {
    pub template: TemplateId,
    pub text: String,
    pub bindings: BTreeMap<String, String>,
    /// Hex SHA-256 of `text`.
    pub hash: String,
}

impl PromptBundle {
    fn new(template: TemplateId, text: String, bindings: BTreeMap<String, String>) -> Self {
        let hash = prompt_hash(&text);
        PromptBundle { template, text, bindings, hash }
    }
}

pub fn prompt_hash(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Python list literal of the words, phones joined, e.g. `['san', 'an']`.
pub fn python_word_list(words: &[Word]) -> String {
    let items: Vec<String> = words.iter().map(|w| quote(&w.to_string())).collect();
    format!("[{}]", items.join(", "))
}

fn word_tables(task: &PbeTask) -> (String, String) {
    let mut raw = String::from("| source | target |\n|---|---|\n");
    let mut processed = raw.clone();
    for (x, y) in task.inputs.iter().zip(&task.outputs) {
        raw.push_str(&format!("| {x} | {y} |\n"));
        processed.push_str(&format!("| {} | {} |\n", preprocess(x), preprocess(y)));
    }
    (raw, processed)
}

/// The single-law induction prompt for a task.
pub fn build_sli_prompt(task: &PbeTask) -> PromptBundle {
    let (raw, processed) = word_tables(task);
    let sections = [
        "You would like to implement a BasicAction to transform the source words so that they can be as close to the target words, measured by edit distance.\n".to_string(),
        DESCRIPTION.to_string(),
        format!(
            "Here is a table of source words and target words BEFORE preprocess:\n\n{raw}\nHere is a table of source words and target words AFTER preprocess:\n\n{processed}"
        ),
        format!("Here are some examples of how actions can be implemented.\n\n{DEMONSTRATIONS}"),
        format!("```python\n{SOURCE}```\n"),
        INSTRUCTIONS.to_string(),
    ];
    let text = SECTION_MARKERS
        .iter()
        .zip(sections)
        .map(|(m, body)| format!("{m}\n\n{body}"))
        .collect::<Vec<_>>()
        .join("\n");
    let bindings = BTreeMap::from([
        ("word_list".to_string(), raw),
        ("processed_word_list".to_string(), processed),
    ]);
    PromptBundle::new(TemplateId::SliSingleLaw, text, bindings)
}

/// A datagen prompt with `seed_words` filled into the template's final slot.
pub fn build_datagen_prompt(template: TemplateId, seed_words: &[Word]) -> Result<PromptBundle, GatewayError> {
    if seed_words.len() != SEED_WORDS {
        return Err(GatewayError::WrongSeedCount { expected: SEED_WORDS, got: seed_words.len() });
    }
    let body = match template {
        TemplateId::RpLiDatagen => RP_LI_TEMPLATE,
        TemplateId::RpPiDatagen => RP_PI_TEMPLATE,
        TemplateId::SliSingleLaw => return Err(GatewayError::Config("the SLI template takes a task, not seed words".into())),
    };
    let list = python_word_list(seed_words);
    let text = body.replacen("{input_words}", &list, 1);
    let bindings = BTreeMap::from([("input_words".to_string(), list)]);
    Ok(PromptBundle::new(template, text, bindings))
}
