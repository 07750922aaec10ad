//! Lexicon management: loading and saving grammars, per-word lookup,
//! enumeration of lexical selections, and the connectivity condition.
//!
//! A grammar file is a UTF-8 JSON document:
//!
//! ```json
//! {
//!   "name": "toy",
//!   "words": {
//!     "la": [
//!       {
//!         "nodes": [
//!           {"id": "G4", "cat": "DET", "pol": "+", "phon": "anchor",
//!            "feats": {"gen": "f", "num": "sg"}}
//!         ],
//!         "children": [],
//!         "dominance": [],
//!         "precedence": []
//!       }
//!     ]
//!   }
//! }
//! ```
//!
//! Polarity tokens are `+`, `-`, `~d`, `~c`, `=`; phon tokens are `anchor`,
//! `empty`, `internal` (the default). Feature values starting with `?` are
//! variables scoped to their description.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::description::{
    parse_feature_value, validate_dap, Dap, DapNode, FeatureStructure, FeatureValue, Phon,
    Violation,
};
use crate::polarity::Polarity;

/// Errors raised while loading a grammar or resolving tokens against it.
#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("grammar document is not valid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown polarity token `{token}` on node `{node}` of `{word}` entry {entry}")]
    UnknownPolarityToken {
        token: String,
        word: String,
        entry: usize,
        node: String,
    },
    #[error("unknown phon token `{token}` on node `{node}` of `{word}` entry {entry}")]
    UnknownPhonToken {
        token: String,
        word: String,
        entry: usize,
        node: String,
    },
    #[error("word `{word}` has an empty entry list")]
    EmptyEntries { word: String },
    #[error("`{word}` entry {entry} is ill-formed: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDap {
        word: String,
        entry: usize,
        violations: Vec<Violation>,
    },
    #[error("word `{0}` is not in the lexicon")]
    UnknownWord(String),
    #[error("failed to read grammar: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct RawGrammar {
    name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    words: BTreeMap<String, Vec<RawDap>>,
}

#[derive(Serialize, Deserialize)]
struct RawDap {
    nodes: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<(String, Vec<String>)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dominance: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    precedence: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    id: String,
    cat: String,
    pol: String,
    #[serde(default = "default_phon")]
    phon: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    feats: BTreeMap<String, String>,
}

fn default_phon() -> String {
    "internal".to_string()
}

/// A loaded grammar: word form to its (non-empty) list of descriptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarLexicon {
    pub name: String,
    pub metadata: BTreeMap<String, String>,
    entries: BTreeMap<String, Vec<Dap>>,
}

/// A loaded grammar together with the validation problems of its entries,
/// for tools that report rather than fail.
pub struct LoadReport {
    pub lexicon: GrammarLexicon,
    pub violations: Vec<(String, usize, Vec<Violation>)>,
}

impl GrammarLexicon {
    /// Parses and validates a grammar document. Any ill-formed entry is an
    /// error; use [`GrammarLexicon::load_with_report`] to collect problems
    /// instead.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(source: &str) -> Result<GrammarLexicon, GrammarError> {
        let report = GrammarLexicon::load_with_report(source)?;
        if let Some((word, entry, violations)) = report.violations.into_iter().next() {
            return Err(GrammarError::InvalidDap {
                word,
                entry,
                violations,
            });
        }
        Ok(report.lexicon)
    }

    /// Parses a grammar document, keeping per-entry well-formedness problems
    /// as data. Format-level problems (bad JSON, unknown tokens, empty entry
    /// lists) are still errors.
    pub fn load_with_report(source: &str) -> Result<LoadReport, GrammarError> {
        let raw: RawGrammar = serde_json::from_str(source)?;
        let mut entries = BTreeMap::new();
        let mut all_violations = Vec::new();
        for (word, raw_daps) in raw.words {
            if raw_daps.is_empty() {
                return Err(GrammarError::EmptyEntries { word });
            }
            let mut daps = Vec::with_capacity(raw_daps.len());
            for (entry, raw_dap) in raw_daps.into_iter().enumerate() {
                let dap = convert_dap(&word, entry, raw_dap)?;
                let violations = validate_dap(&dap);
                if !violations.is_empty() {
                    all_violations.push((word.clone(), entry, violations));
                }
                daps.push(dap);
            }
            entries.insert(word, daps);
        }
        Ok(LoadReport {
            lexicon: GrammarLexicon {
                name: raw.name,
                metadata: raw.metadata,
                entries,
            },
            violations: all_violations,
        })
    }

    pub fn from_reader(mut reader: impl Read) -> Result<GrammarLexicon, GrammarError> {
        let mut buf = String::new();
        reader.read_to_string(&mut buf)?;
        GrammarLexicon::from_str(&buf)
    }

    /// Serializes back to the grammar file format. Loading the result yields
    /// the same lexicon (keys come out sorted).
    pub fn to_json_string(&self) -> String {
        let raw = RawGrammar {
            name: self.name.clone(),
            metadata: self.metadata.clone(),
            words: self
                .entries
                .iter()
                .map(|(word, daps)| {
                    let raws = daps
                        .iter()
                        .map(|dap| RawDap {
                            nodes: dap
                                .nodes
                                .iter()
                                .map(|n| RawNode {
                                    id: n.id.clone(),
                                    cat: n.cat.clone(),
                                    pol: n.polarity.token().to_string(),
                                    phon: n.phon.token().to_string(),
                                    feats: n
                                        .features
                                        .pairs
                                        .iter()
                                        .map(|(k, v)| {
                                            let text = match v {
                                                FeatureValue::Atom(a) => a.clone(),
                                                FeatureValue::Var(x) => format!("?{x}"),
                                            };
                                            (k.clone(), text)
                                        })
                                        .collect(),
                                })
                                .collect(),
                            children: dap.parent_edges.clone(),
                            dominance: dap.dominance_edges.clone(),
                            precedence: dap.precedence_edges.clone(),
                        })
                        .collect();
                    (word.clone(), raws)
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("grammar serialization cannot fail")
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn word_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries_for(&self, word: &str) -> Option<&[Dap]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// Entries violating the connectivity condition: a description must hold
    /// at least one positive, negative or dependency-virtual node. When this
    /// returns an empty list, every dependency graph extracted from a parse
    /// with this grammar is connected.
    pub fn check_connectivity_condition(&self) -> Vec<(String, usize)> {
        let mut offenders = Vec::new();
        for (word, daps) in &self.entries {
            for (entry, dap) in daps.iter().enumerate() {
                let ok = dap.nodes.iter().any(|n| {
                    matches!(
                        n.polarity,
                        Polarity::Positive | Polarity::Negative | Polarity::VirtualDep
                    )
                });
                if !ok {
                    offenders.push((word.clone(), entry));
                }
            }
        }
        offenders
    }

    /// Lazily enumerates every lexical selection for `tokens`, i.e. the
    /// Cartesian product of the tokens' entry lists, in entry-index
    /// lexicographic order (last token varies fastest).
    pub fn lexical_selections<'g>(
        &'g self,
        tokens: &[String],
    ) -> Result<Selections<'g>, GrammarError> {
        let mut choices = Vec::with_capacity(tokens.len());
        for token in tokens {
            match self.entries_for(token) {
                Some(daps) => choices.push(daps),
                None => return Err(GrammarError::UnknownWord(token.clone())),
            }
        }
        Ok(Selections {
            choices,
            next: Some(vec![0; tokens.len()]),
        })
    }
}

/// One description picked per input token, in sentence order.
#[derive(Debug, Clone)]
pub struct LexicalSelection<'g> {
    pub picks: Vec<&'g Dap>,
    pub entry_indices: Vec<usize>,
}

/// Iterator over lexical selections; see
/// [`GrammarLexicon::lexical_selections`].
pub struct Selections<'g> {
    choices: Vec<&'g [Dap]>,
    next: Option<Vec<usize>>,
}

impl<'g> Iterator for Selections<'g> {
    type Item = LexicalSelection<'g>;

    fn next(&mut self) -> Option<Self::Item> {
        let indices = self.next.take()?;
        let picks = indices
            .iter()
            .zip(&self.choices)
            .map(|(&i, daps)| &daps[i])
            .collect();
        // Odometer step; exhausted when the first digit would overflow.
        let mut bumped = indices.clone();
        let mut pos = bumped.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            bumped[pos] += 1;
            if bumped[pos] < self.choices[pos].len() {
                self.next = Some(bumped);
                break;
            }
            bumped[pos] = 0;
        }
        // A zero-token sentence has exactly one (empty) selection.
        if self.choices.is_empty() {
            self.next = None;
        }
        Some(LexicalSelection {
            picks,
            entry_indices: indices,
        })
    }
}

fn convert_dap(word: &str, entry: usize, raw: RawDap) -> Result<Dap, GrammarError> {
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    for raw_node in raw.nodes {
        let polarity = Polarity::from_token(&raw_node.pol).ok_or_else(|| {
            GrammarError::UnknownPolarityToken {
                token: raw_node.pol.clone(),
                word: word.to_string(),
                entry,
                node: raw_node.id.clone(),
            }
        })?;
        let phon =
            Phon::from_token(&raw_node.phon).ok_or_else(|| GrammarError::UnknownPhonToken {
                token: raw_node.phon.clone(),
                word: word.to_string(),
                entry,
                node: raw_node.id.clone(),
            })?;
        let features = FeatureStructure {
            pairs: raw_node
                .feats
                .into_iter()
                .map(|(k, v)| (k, parse_feature_value(&v)))
                .collect(),
        };
        nodes.push(DapNode {
            id: raw_node.id,
            cat: raw_node.cat,
            polarity,
            features,
            phon,
        });
    }
    Ok(Dap {
        word: word.to_string(),
        nodes,
        parent_edges: raw.children,
        dominance_edges: raw.dominance,
        precedence_edges: raw.precedence,
    })
}

/// Splits a sentence into tokens on whitespace. No normalisation is applied;
/// grammars control their own token forms.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_string).collect()
}
