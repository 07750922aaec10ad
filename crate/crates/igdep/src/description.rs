//! Polarized tree descriptions: the elementary structures of the grammar.
//!
//! A description is a set of categorised, polarized nodes plus parenthood,
//! dominance and precedence relations. Each description is anchored to one
//! surface word. Feature structures are flat maps from feature names to
//! atoms or named variables; variables are scoped to one description.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polarity::Polarity;

/// Value side of a feature pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureValue {
    Atom(String),
    Var(String),
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => write!(f, "{a}"),
            FeatureValue::Var(v) => write!(f, "?{v}"),
        }
    }
}

/// A flat feature structure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureStructure {
    pub pairs: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        FeatureStructure::default()
    }

    /// Builds a structure from `(name, value)` pairs, reading values with a
    /// leading `?` as variables.
    pub fn from_pairs<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs = pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), parse_feature_value(v)))
            .collect();
        FeatureStructure { pairs }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<&FeatureValue> {
        self.pairs.get(feature)
    }

    /// The atom bound to `feature`, if the feature is present and atomic.
    pub fn atom(&self, feature: &str) -> Option<&str> {
        match self.pairs.get(feature) {
            Some(FeatureValue::Atom(a)) => Some(a),
            _ => None,
        }
    }
}

/// Reads a feature value from grammar-file syntax: a leading `?` marks a
/// variable, anything else is an atom.
pub fn parse_feature_value(text: &str) -> FeatureValue {
    match text.strip_prefix('?') {
        Some(name) => FeatureValue::Var(name.to_string()),
        None => FeatureValue::Atom(text.to_string()),
    }
}

/// Failed unification of two feature structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("feature `{feature}` cannot unify: `{left}` vs `{right}`")]
pub struct UnifyFailure {
    pub feature: String,
    pub left: String,
    pub right: String,
}

/// Union-find store for variable bindings, shared across several
/// unification calls so that a variable used in two places stays consistent.
#[derive(Debug, Clone, Default)]
pub struct Bindings<K: Ord + Clone> {
    parent: BTreeMap<K, K>,
    atom: BTreeMap<K, String>,
}

impl<K: Ord + Clone> Bindings<K> {
    pub fn new() -> Self {
        Bindings {
            parent: BTreeMap::new(),
            atom: BTreeMap::new(),
        }
    }

    fn root(&self, k: &K) -> K {
        let mut cur = k.clone();
        while let Some(next) = self.parent.get(&cur) {
            cur = next.clone();
        }
        cur
    }

    /// The atom a variable resolves to, if any.
    pub fn resolve(&self, k: &K) -> Option<&str> {
        let root = self.root(k);
        self.atom.get(&root).map(String::as_str)
    }

    /// Canonical representative of a variable.
    pub fn canonical(&self, k: &K) -> K {
        self.root(k)
    }

    fn bind_atom(&mut self, k: &K, value: &str) -> Result<(), (String, String)> {
        let root = self.root(k);
        match self.atom.get(&root) {
            Some(existing) if existing != value => Err((existing.clone(), value.to_string())),
            Some(_) => Ok(()),
            None => {
                self.atom.insert(root, value.to_string());
                Ok(())
            }
        }
    }

    fn union(&mut self, a: &K, b: &K) -> Result<(), (String, String)> {
        let ra = self.root(a);
        let rb = self.root(b);
        if ra == rb {
            return Ok(());
        }
        match (self.atom.get(&ra).cloned(), self.atom.get(&rb).cloned()) {
            (Some(va), Some(vb)) if va != vb => return Err((va, vb)),
            (Some(va), None) => {
                self.atom.insert(rb.clone(), va);
            }
            _ => {}
        }
        self.parent.insert(ra, rb);
        Ok(())
    }
}

/// Generic value used by the in-context unifier; the engine instantiates `K`
/// with token-qualified variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term<K> {
    Atom(String),
    Var(K),
}

/// Unifies `other` into `target` under shared `bindings`. On success,
/// `target` holds the union of both maps; on failure `target` and `bindings`
/// are left in an unspecified (partially updated) state, so callers that
/// need rollback should clone first.
pub fn unify_into<K: Ord + Clone>(
    target: &mut BTreeMap<String, Term<K>>,
    other: &BTreeMap<String, Term<K>>,
    bindings: &mut Bindings<K>,
) -> Result<(), UnifyFailure> {
    for (feature, value) in other {
        match target.get(feature) {
            None => {
                target.insert(feature.clone(), value.clone());
            }
            Some(existing) => {
                let clash = match (existing, value) {
                    (Term::Atom(a), Term::Atom(b)) => {
                        if a == b {
                            Ok(())
                        } else {
                            Err((a.clone(), b.clone()))
                        }
                    }
                    (Term::Atom(a), Term::Var(v)) | (Term::Var(v), Term::Atom(a)) => {
                        bindings.bind_atom(v, a)
                    }
                    (Term::Var(v), Term::Var(w)) => bindings.union(v, w),
                };
                if let Err((left, right)) = clash {
                    return Err(UnifyFailure {
                        feature: feature.clone(),
                        left,
                        right,
                    });
                }
                // Prefer keeping an atom in the map when one side has it.
                if matches!(target.get(feature), Some(Term::Var(_))) {
                    if let Term::Atom(_) = value {
                        target.insert(feature.clone(), value.clone());
                    }
                }
            }
        }
    }
    Ok(())
}

fn to_terms(fs: &FeatureStructure) -> BTreeMap<String, Term<String>> {
    fs.pairs
        .iter()
        .map(|(k, v)| {
            let term = match v {
                FeatureValue::Atom(a) => Term::Atom(a.clone()),
                FeatureValue::Var(x) => Term::Var(x.clone()),
            };
            (k.clone(), term)
        })
        .collect()
}

/// Standard flat unification of two feature structures. Variables with the
/// same name refer to the same variable. The result carries the union of
/// both domains with all bindings applied; unbound variables keep a
/// canonical name.
pub fn unify(f: &FeatureStructure, g: &FeatureStructure) -> Result<FeatureStructure, UnifyFailure> {
    let mut bindings = Bindings::new();
    let mut merged = to_terms(f);
    unify_into(&mut merged, &to_terms(g), &mut bindings)?;
    let pairs = merged
        .into_iter()
        .map(|(k, term)| {
            let value = match term {
                Term::Atom(a) => FeatureValue::Atom(a),
                Term::Var(x) => match bindings.resolve(&x) {
                    Some(a) => FeatureValue::Atom(a.to_string()),
                    None => FeatureValue::Var(bindings.canonical(&x)),
                },
            };
            (k, value)
        })
        .collect();
    Ok(FeatureStructure { pairs })
}

/// Phonological status of a description node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phon {
    /// Carries the description's word.
    Anchor,
    /// A phonologically empty leaf.
    Empty,
    /// No phonological content of its own.
    Internal,
}

impl Phon {
    pub fn token(self) -> &'static str {
        match self {
            Phon::Anchor => "anchor",
            Phon::Empty => "empty",
            Phon::Internal => "internal",
        }
    }

    pub fn from_token(token: &str) -> Option<Phon> {
        match token {
            "anchor" => Some(Phon::Anchor),
            "empty" => Some(Phon::Empty),
            "internal" => Some(Phon::Internal),
            _ => None,
        }
    }
}

/// One node of a polarized tree description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DapNode {
    pub id: String,
    pub cat: String,
    pub polarity: Polarity,
    pub features: FeatureStructure,
    pub phon: Phon,
}

/// A polarized tree description anchored to one word.
///
/// `parent_edges` gives each parent its ordered child list; `dominance_edges`
/// are underspecified ancestor-or-equal constraints; `precedence_edges`
/// require the whole yield of the left node before the whole yield of the
/// right one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dap {
    pub word: String,
    pub nodes: Vec<DapNode>,
    pub parent_edges: Vec<(String, Vec<String>)>,
    pub dominance_edges: Vec<(String, String)>,
    pub precedence_edges: Vec<(String, String)>,
}

impl Dap {
    pub fn node(&self, id: &str) -> Option<&DapNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn anchor(&self) -> Option<&DapNode> {
        self.nodes.iter().find(|n| n.phon == Phon::Anchor)
    }

    /// Declared parent of `id`, if any.
    pub fn parent_of(&self, id: &str) -> Option<&str> {
        for (parent, children) in &self.parent_edges {
            if children.iter().any(|c| c == id) {
                return Some(parent);
            }
        }
        None
    }
}

/// A well-formedness defect of a description. Violations are data, not
/// errors: validation always runs to completion and reports all of them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("node id `{0}` is declared more than once")]
    DuplicateNodeId(String),
    #[error("no node carries the anchor")]
    MissingAnchor,
    #[error("node `{0}` is a second anchor")]
    DuplicateAnchor(String),
    #[error("{context} references unknown node id `{id}`")]
    UnknownNodeId { id: String, context: String },
    #[error("node `{0}` has more than one parent position")]
    MultipleParents(String),
    #[error("parent `{0}` has more than one children list")]
    DuplicateParentEntry(String),
    #[error("parenthood contains a cycle through `{0}`")]
    ParentCycle(String),
    #[error("empty node `{0}` has declared children")]
    EmptyNodeHasChildren(String),
    #[error("dominance combined with parenthood contains a cycle through `{0}`")]
    DominanceCycle(String),
    #[error("precedence combined with sibling order contains a cycle through `{0}`")]
    PrecedenceCycle(String),
}

fn has_cycle(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    fn visit(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> Option<usize> {
        state[v] = 1;
        for &w in &adj[v] {
            match state[w] {
                1 => return Some(w),
                0 => {
                    if let Some(c) = visit(w, adj, state) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        state[v] = 2;
        None
    }
    for v in 0..n {
        if state[v] == 0 {
            if let Some(c) = visit(v, &adj, &mut state) {
                return Some(c);
            }
        }
    }
    None
}

/// Checks every structural invariant of a description and returns all
/// violations found; an empty list means the description is well formed.
pub fn validate_dap(dap: &Dap) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, node) in dap.nodes.iter().enumerate() {
        if index.insert(node.id.as_str(), i).is_some() {
            violations.push(Violation::DuplicateNodeId(node.id.clone()));
        }
    }

    let anchors: Vec<&DapNode> = dap
        .nodes
        .iter()
        .filter(|n| n.phon == Phon::Anchor)
        .collect();
    if anchors.is_empty() {
        violations.push(Violation::MissingAnchor);
    }
    for extra in anchors.iter().skip(1) {
        violations.push(Violation::DuplicateAnchor(extra.id.clone()));
    }

    let resolve = |id: &str, context: &str, violations: &mut Vec<Violation>| -> Option<usize> {
        match index.get(id) {
            Some(&i) => Some(i),
            None => {
                violations.push(Violation::UnknownNodeId {
                    id: id.to_string(),
                    context: context.to_string(),
                });
                None
            }
        }
    };

    // Parenthood: each node has at most one parent position, each parent one
    // children list, and the parent relation is acyclic.
    let mut parent_edges: Vec<(usize, usize)> = Vec::new();
    let mut seen_parent_lists: BTreeSet<usize> = BTreeSet::new();
    let mut child_positions: BTreeSet<usize> = BTreeSet::new();
    let mut sibling_edges: Vec<(usize, usize)> = Vec::new();
    for (parent, children) in &dap.parent_edges {
        let p = resolve(parent, "parent edge", &mut violations);
        if let Some(p) = p {
            if !seen_parent_lists.insert(p) {
                violations.push(Violation::DuplicateParentEntry(parent.clone()));
            }
        }
        let mut prev: Option<usize> = None;
        for child in children {
            let c = resolve(child, "parent edge", &mut violations);
            if let (Some(p), Some(c)) = (p, c) {
                if !child_positions.insert(c) {
                    violations.push(Violation::MultipleParents(child.clone()));
                }
                parent_edges.push((p, c));
                if let Some(prev) = prev {
                    sibling_edges.push((prev, c));
                }
                prev = Some(c);
            }
        }
    }
    if let Some(c) = has_cycle(dap.nodes.len(), &parent_edges) {
        violations.push(Violation::ParentCycle(dap.nodes[c].id.clone()));
    }

    // Empty nodes are leaves.
    for &(p, _) in &parent_edges {
        if dap.nodes[p].phon == Phon::Empty {
            let id = dap.nodes[p].id.clone();
            if !violations.contains(&Violation::EmptyNodeHasChildren(id.clone())) {
                violations.push(Violation::EmptyNodeHasChildren(id));
            }
        }
    }

    // Dominance must stay acyclic when combined with parenthood.
    let mut dom_edges = parent_edges.clone();
    for (anc, desc) in &dap.dominance_edges {
        let a = resolve(anc, "dominance edge", &mut violations);
        let d = resolve(desc, "dominance edge", &mut violations);
        if let (Some(a), Some(d)) = (a, d) {
            dom_edges.push((a, d));
        }
    }
    if has_cycle(dap.nodes.len(), &parent_edges).is_none() {
        if let Some(c) = has_cycle(dap.nodes.len(), &dom_edges) {
            violations.push(Violation::DominanceCycle(dap.nodes[c].id.clone()));
        }
    }

    // Precedence must stay acyclic and irreflexive combined with sibling
    // order.
    let mut prec_edges = sibling_edges;
    for (l, r) in &dap.precedence_edges {
        let li = resolve(l, "precedence edge", &mut violations);
        let ri = resolve(r, "precedence edge", &mut violations);
        if let (Some(li), Some(ri)) = (li, ri) {
            if li == ri {
                violations.push(Violation::PrecedenceCycle(l.clone()));
            } else {
                prec_edges.push((li, ri));
            }
        }
    }
    if let Some(c) = has_cycle(dap.nodes.len(), &prec_edges) {
        violations.push(Violation::PrecedenceCycle(dap.nodes[c].id.clone()));
    }

    violations
}
