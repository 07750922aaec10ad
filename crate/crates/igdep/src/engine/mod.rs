//! The parser: searches for saturated tree models of a lexical selection by
//! iterated node superposition.
//!
//! A model assigns every description node of the selection to exactly one
//! tree node (its merge set), such that every merge set saturates, carries a
//! single category and a consistent feature structure, and the tree realises
//! all declared parenthood, dominance and precedence constraints with the
//! anchors appearing in input order. Finding a model is a combinatorial
//! search; [`parse_all`] runs a backtracking engine with explicit budgets,
//! and [`oracle_parse`] enumerates every node partition outright as a small
//! scale ground truth.

mod oracle;
mod search;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::description::{Bindings, FeatureStructure, FeatureValue, Phon, Term};
use crate::grammar::{GrammarError, GrammarLexicon, LexicalSelection};
use crate::polarity::Polarity;

pub use oracle::{oracle_parse, ORACLE_NODE_CAP};
pub use verify::verify_model;

/// Budgets for the model search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of node merges across the whole call.
    pub max_merges: usize,
    /// Stop after this many distinct models.
    pub max_models: usize,
    /// Wall-clock budget for the whole call.
    pub timeout_ms: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_merges: 10_000,
            max_models: 16,
            timeout_ms: 5_000,
        }
    }
}

/// Knobs that change how the search explores, not what it accepts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Allow two nodes of the same description to merge with each other.
    /// Off by default; no analysis in the bundled grammars needs it.
    pub allow_intra_dap_merges: bool,
    /// Explore merge candidates in reversed order. The model set must not
    /// change; used to test order insensitivity.
    pub reverse_exploration: bool,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("search budget exceeded after {merges} merges and {elapsed_ms} ms (max_merges {max_merges}, timeout_ms {timeout_ms})")]
    LimitExceeded {
        merges: usize,
        elapsed_ms: u64,
        max_merges: usize,
        timeout_ms: u64,
    },
    #[error("selection has {nodes} description nodes, above the oracle cap of {cap}")]
    OracleCapExceeded { nodes: usize, cap: usize },
}

/// One description node inside a model's merge set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelMember {
    pub token: usize,
    pub node_id: String,
    pub polarity: Polarity,
}

impl fmt::Display for ModelMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.token, self.node_id)
    }
}

/// One node of a parse tree: a saturated merge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelNode {
    pub id: usize,
    pub cat: String,
    pub children: Vec<usize>,
    pub members: Vec<ModelMember>,
    /// Unified feature structure of the merge set, with bindings applied.
    pub features: FeatureStructure,
    /// Token realised at this node, when the set contains an anchor.
    pub anchor_token: Option<usize>,
    /// True when the set contains a phonologically empty node.
    pub empty: bool,
}

/// A fully specified constituency tree over merge sets. Nodes are numbered
/// in depth-first preorder; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseModel {
    pub nodes: Vec<ModelNode>,
    pub tokens: Vec<String>,
    /// Entry picked per token in the lexical selection this model came from.
    pub entry_indices: Vec<usize>,
    /// Token indices as realised by anchor leaves, left to right. Always the
    /// identity permutation on valid models.
    pub yield_order: Vec<usize>,
}

impl ParseModel {
    pub fn root(&self) -> &ModelNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &ModelNode {
        &self.nodes[id]
    }

    /// Merge map view: tree node id to its description-node members.
    pub fn merge_map(&self) -> BTreeMap<usize, &[ModelMember]> {
        self.nodes
            .iter()
            .map(|n| (n.id, n.members.as_slice()))
            .collect()
    }

    /// Bracketed rendering of the constituency tree, e.g.
    /// `(S (NP jean) (V (CL en) (V connaît)) ...)`.
    pub fn bracketed(&self) -> String {
        let mut out = String::new();
        self.write_bracketed(0, &mut out);
        out
    }

    fn write_bracketed(&self, id: usize, out: &mut String) {
        let node = &self.nodes[id];
        out.push('(');
        out.push_str(&node.cat);
        if let Some(token) = node.anchor_token {
            out.push(' ');
            out.push_str(&self.tokens[token]);
        }
        for &child in &node.children {
            out.push(' ');
            self.write_bracketed(child, out);
        }
        out.push(')');
    }

    /// Structured export: the tree as nested objects plus the merge map.
    pub fn to_json(&self) -> Value {
        fn tree(model: &ParseModel, id: usize) -> Value {
            let node = &model.nodes[id];
            json!({
                "id": node.id,
                "cat": node.cat,
                "token": node.anchor_token,
                "merged": node.members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "children": node.children.iter().map(|&c| tree(model, c)).collect::<Vec<_>>(),
            })
        }
        let merge_map: BTreeMap<String, Vec<String>> = self
            .nodes
            .iter()
            .map(|n| {
                (
                    n.id.to_string(),
                    n.members.iter().map(|m| m.to_string()).collect(),
                )
            })
            .collect();
        json!({
            "tokens": self.tokens,
            "entry_indices": self.entry_indices,
            "tree": tree(self, 0),
            "merge_map": merge_map,
            "yield_order": self.yield_order,
        })
    }

    /// Canonical text form used for model identity: two models are the same
    /// iff a child-order preserving tree isomorphism maps categories and
    /// merge sets onto each other, which makes this rendering injective.
    pub fn canonical(&self) -> String {
        fn rec(model: &ParseModel, id: usize, out: &mut String) {
            let node = &model.nodes[id];
            out.push('(');
            out.push_str(&node.cat);
            out.push('|');
            for (i, m) in node.members.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&m.to_string());
            }
            for &child in &node.children {
                rec(model, child, out);
            }
            out.push(')');
        }
        let mut out = String::new();
        rec(self, 0, &mut out);
        out
    }
}

/// Best partial saturation seen on failed searches; reported on no-parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialSaturation {
    pub saturated_classes: usize,
    pub total_classes: usize,
    pub open_poles: usize,
    pub open_virtuals: usize,
}

impl PartialSaturation {
    fn openness(&self) -> usize {
        self.open_poles + self.open_virtuals
    }
}

/// Search bookkeeping returned next to the models.
#[derive(Debug, Clone, Default)]
pub struct SearchDiagnostic {
    pub selections_tried: usize,
    pub merges: usize,
    /// Furthest saturation reached on branches that died; `None` only when
    /// every branch materialised.
    pub best_partial: Option<PartialSaturation>,
}

/// Result of a parse call. An empty model list is the no-parse value.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub models: Vec<ParseModel>,
    pub diagnostic: SearchDiagnostic,
}

pub(crate) type VarKey = (usize, String);

/// A lexical selection flattened to plain indices, shared by the search, the
/// oracle and the verifier.
pub(crate) struct FlatNode {
    pub token: usize,
    pub local_id: String,
    pub cat: String,
    pub polarity: Polarity,
    pub phon: Phon,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub feats: BTreeMap<String, Term<VarKey>>,
}

pub(crate) struct FlatSelection {
    pub nodes: Vec<FlatNode>,
    pub precedence: Vec<(usize, usize)>,
    pub dominance: Vec<(usize, usize)>,
    pub tokens: Vec<String>,
    pub entry_indices: Vec<usize>,
}

impl FlatSelection {
    pub fn build(selection: &LexicalSelection<'_>, tokens: &[String]) -> FlatSelection {
        let mut nodes = Vec::new();
        let mut precedence = Vec::new();
        let mut dominance = Vec::new();
        for (token, dap) in selection.picks.iter().enumerate() {
            let base = nodes.len();
            let local_index: BTreeMap<&str, usize> = dap
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.id.as_str(), base + i))
                .collect();
            for node in &dap.nodes {
                let feats = node
                    .features
                    .pairs
                    .iter()
                    .map(|(k, v)| {
                        let term = match v {
                            FeatureValue::Atom(a) => Term::Atom(a.clone()),
                            FeatureValue::Var(x) => Term::Var((token, x.clone())),
                        };
                        (k.clone(), term)
                    })
                    .collect();
                nodes.push(FlatNode {
                    token,
                    local_id: node.id.clone(),
                    cat: node.cat.clone(),
                    polarity: node.polarity,
                    phon: node.phon,
                    parent: None,
                    children: Vec::new(),
                    feats,
                });
            }
            for (parent, children) in &dap.parent_edges {
                let p = local_index[parent.as_str()];
                for child in children {
                    let c = local_index[child.as_str()];
                    nodes[c].parent = Some(p);
                    nodes[p].children.push(c);
                }
            }
            for (l, r) in &dap.precedence_edges {
                precedence.push((local_index[l.as_str()], local_index[r.as_str()]));
            }
            for (a, d) in &dap.dominance_edges {
                dominance.push((local_index[a.as_str()], local_index[d.as_str()]));
            }
        }
        FlatSelection {
            nodes,
            precedence,
            dominance,
            tokens: tokens.to_vec(),
            entry_indices: selection.entry_indices.clone(),
        }
    }

    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    /// Sort key that breaks ties between nodes: token index first, then the
    /// node id string.
    pub fn sort_key(&self, node: usize) -> (usize, &str) {
        (self.nodes[node].token, self.nodes[node].local_id.as_str())
    }
}

/// Builds a [`ParseModel`] once a partition, its parent links and the child
/// orders have been fixed and checked. `classes` maps a class index to its
/// member nodes; `orders` gives each class its ordered children classes.
pub(crate) fn assemble_model(
    flat: &FlatSelection,
    classes: &[Vec<usize>],
    root: usize,
    orders: &BTreeMap<usize, Vec<usize>>,
    bindings: &Bindings<VarKey>,
    class_feats: impl Fn(usize) -> BTreeMap<String, Term<VarKey>>,
) -> ParseModel {
    let mut nodes: Vec<ModelNode> = Vec::with_capacity(classes.len());
    let mut yield_order = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn visit(
        class: usize,
        flat: &FlatSelection,
        classes: &[Vec<usize>],
        orders: &BTreeMap<usize, Vec<usize>>,
        bindings: &Bindings<VarKey>,
        class_feats: &impl Fn(usize) -> BTreeMap<String, Term<VarKey>>,
        nodes: &mut Vec<ModelNode>,
        yield_order: &mut Vec<usize>,
    ) -> usize {
        let id = nodes.len();
        let members: Vec<ModelMember> = {
            let mut ms: Vec<ModelMember> = classes[class]
                .iter()
                .map(|&n| ModelMember {
                    token: flat.nodes[n].token,
                    node_id: flat.nodes[n].local_id.clone(),
                    polarity: flat.nodes[n].polarity,
                })
                .collect();
            ms.sort();
            ms
        };
        let anchor_token = classes[class]
            .iter()
            .find(|&&n| flat.nodes[n].phon == Phon::Anchor)
            .map(|&n| flat.nodes[n].token);
        let empty = classes[class]
            .iter()
            .any(|&n| flat.nodes[n].phon == Phon::Empty);
        let features = resolve_features(&class_feats(class), bindings);
        nodes.push(ModelNode {
            id,
            cat: flat.nodes[classes[class][0]].cat.clone(),
            children: Vec::new(),
            members,
            features,
            anchor_token,
            empty,
        });
        if let Some(token) = anchor_token {
            yield_order.push(token);
        }
        let mut child_ids = Vec::new();
        if let Some(children) = orders.get(&class) {
            for &child in children {
                child_ids.push(visit(
                    child,
                    flat,
                    classes,
                    orders,
                    bindings,
                    class_feats,
                    nodes,
                    yield_order,
                ));
            }
        }
        nodes[id].children = child_ids;
        id
    }

    visit(
        root,
        flat,
        classes,
        orders,
        bindings,
        &class_feats,
        &mut nodes,
        &mut yield_order,
    );

    ParseModel {
        nodes,
        tokens: flat.tokens.clone(),
        entry_indices: flat.entry_indices.clone(),
        yield_order,
    }
}

fn resolve_features(
    feats: &BTreeMap<String, Term<VarKey>>,
    bindings: &Bindings<VarKey>,
) -> FeatureStructure {
    let pairs = feats
        .iter()
        .map(|(k, term)| {
            let value = match term {
                Term::Atom(a) => FeatureValue::Atom(a.clone()),
                Term::Var(v) => match bindings.resolve(v) {
                    Some(a) => FeatureValue::Atom(a.to_string()),
                    None => {
                        let (token, name) = bindings.canonical(v);
                        FeatureValue::Var(format!("{token}:{name}"))
                    }
                },
            };
            (k.clone(), value)
        })
        .collect();
    FeatureStructure { pairs }
}

/// Searches for all models of `tokens` under `grammar`, across every lexical
/// selection, within `limits`. An empty model list with a diagnostic is the
/// no-parse outcome; exceeding a budget is an error.
pub fn parse_all(
    grammar: &GrammarLexicon,
    tokens: &[String],
    limits: SearchLimits,
) -> Result<ParseOutcome, EngineError> {
    parse_all_with(grammar, tokens, limits, EngineOptions::default())
}

/// [`parse_all`] with explicit exploration options.
pub fn parse_all_with(
    grammar: &GrammarLexicon,
    tokens: &[String],
    limits: SearchLimits,
    options: EngineOptions,
) -> Result<ParseOutcome, EngineError> {
    search::run(grammar, tokens, limits, options)
}
