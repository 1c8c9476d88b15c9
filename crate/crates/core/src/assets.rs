//! Demo data compiled into the library. The lexicons are synthetic.

pub const POC_LEXICON: &str = include_str!("../assets/data/poc_lexicon.txt");
pub const PTK_LEXICON: &str = include_str!("../assets/data/ptk_lexicon.txt");
pub const NONCE_WORDS: &str = include_str!("../assets/data/nonce_words.txt");
pub const RULE_DB: &str = include_str!("../assets/data/rules.tsv");
pub const DEMO_CASCADE: &str = include_str!("../assets/data/demo_cascade.txt");
pub const DEMO_LEXICON: &str = include_str!("../assets/data/demo_lexicon.txt");
pub const RP_LI_FIXTURES: &str = include_str!("../assets/fixtures/rp_li.jsonl");
pub const RP_PI_FIXTURES: &str = include_str!("../assets/fixtures/rp_pi_poc.jsonl");

/// Named lexicons: `poc`, `ptk`, `nonce`, `demo`.
pub fn lexicon(name: &str) -> Option<&'static str> {
    match name {
        "poc" => Some(POC_LEXICON),
        "ptk" => Some(PTK_LEXICON),
        "nonce" => Some(NONCE_WORDS),
        "demo" => Some(DEMO_LEXICON),
        _ => None,
    }
}
