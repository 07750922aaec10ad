//! Parsing with polarized tree descriptions, and dependency extraction.
//!
//! Words are looked up in a lexicon of polarized tree descriptions; parsing
//! superposes description nodes until every polarity is saturated, yielding
//! a constituency tree together with the record of which nodes fused where.
//! Each saturation between two words is read back as a labeled dependency,
//! giving a directed dependency graph (not necessarily a tree), which the
//! metrics module classifies by connectivity, projectivity, block-degree and
//! well-nestedness.
//!
//! The `igdep` binary fronts the library: `igdep parse` analyses a sentence,
//! `igdep check` lints a grammar, `igdep corpus` runs accept/reject
//! regressions. A toy French grammar reproducing the bundled corpus ships
//! with the crate and is the default grammar everywhere.

pub mod corpus;
pub mod deps;
pub mod description;
pub mod engine;
pub mod grammar;
pub mod metrics;
pub mod polarity;

/// Grammar and corpus files bundled with the crate.
pub mod assets {
    /// The toy French lexicon: one entry per word, eleven words.
    pub const TOY_GRAMMAR: &str = include_str!("../assets/toy.json");
    /// Variant of the toy lexicon whose `couleur` also has an
    /// utterance-rooted entry, so bare noun phrases parse as fragments.
    pub const TOY_FRAGMENTS_GRAMMAR: &str = include_str!("../assets/toy_fragments.json");
    /// Accept/reject regression corpus, with expected edges on the accepted
    /// side. Runs against the fragment variant of the toy grammar.
    pub const CORPUS: &str = include_str!("../assets/corpus.tsv");
}

pub use deps::{extract, relabel_with_functions, DepKind, Dependency, DependencyGraph};
pub use engine::{
    oracle_parse, parse_all, parse_all_with, verify_model, EngineError, EngineOptions, ParseModel,
    ParseOutcome, SearchLimits,
};
pub use grammar::{tokenize, GrammarError, GrammarLexicon};
pub use metrics::{
    block_degree, is_connected, is_projective, is_well_nested, reach, MetricsReport, Reach,
};
