//! Sound-law rewrite engine and programming-by-examples harness.
//!
//! Words are segmented into phones ([`phonology`]), rewritten by sound laws
//! ([`rewrite`]) written in classical `a > b / L _ R` notation or the
//! `BasicAction(...)` constructor syntax ([`dsl`]). On top of that sit
//! synthetic task generation ([`datagen`]), single-law benchmark
//! construction ([`benchmark`]), scoring and significance testing
//! ([`evaluation`]) and prompt assembly plus a cached chat-completion client
//! ([`gateway`]).

pub mod assets;
pub mod benchmark;
pub mod datagen;
pub mod dsl;
pub mod evaluation;
pub mod gateway;
pub mod phonology;
pub mod rewrite;
pub mod task;

pub use phonology::{FeatureClass, Inventory, Phone, Token, TokenSeq, Word};
pub use rewrite::{Cascade, Mapping, Predicate, SoundLaw};
