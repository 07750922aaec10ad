//! Dependency extraction: every saturation between two words becomes one
//! labeled directed edge.
//!
//! A merge set holding a `+`/`-` pair produced a linear saturation: the word
//! owning the negative node governs the word owning the positive one. Every
//! dependency-virtual node in a set yields a non-linear edge whose governor
//! owns the positive node of the pair, or the saturated node when the set
//! has one. Context-virtual nodes never produce edges. Edges are labeled
//! with the category of the saturation site.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ModelMember, ParseModel};
use crate::polarity::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepKind {
    Linear,
    #[serde(rename = "nonlinear")]
    NonLinear,
}

impl DepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DepKind::Linear => "linear",
            DepKind::NonLinear => "nonlinear",
        }
    }
}

impl fmt::Display for DepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One word-to-word dependency. Token indices are zero-based; `site` is the
/// tree node whose saturation produced the edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dependency {
    pub governor: usize,
    pub dependent: usize,
    pub label: String,
    pub kind: DepKind,
    pub site: usize,
}

/// A directed labeled multigraph over the sentence's token positions.
/// Cycles and multiple governors are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub tokens: Vec<String>,
    pub edges: Vec<Dependency>,
}

#[derive(Debug, Error)]
pub enum GraphReadError {
    #[error("dependency graph document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent dependency graph: {0}")]
    Inconsistent(String),
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n_tokens: usize,
    tokens: Vec<String>,
    edges: Vec<Dependency>,
}

impl DependencyGraph {
    pub fn new(tokens: Vec<String>) -> Self {
        DependencyGraph {
            tokens,
            edges: Vec::new(),
        }
    }

    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn governors_of(&self, token: usize) -> impl Iterator<Item = &Dependency> {
        self.edges.iter().filter(move |e| e.dependent == token)
    }

    /// The graph restricted to its linear edges.
    pub fn linear_projection(&self) -> DependencyGraph {
        DependencyGraph {
            tokens: self.tokens.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| e.kind == DepKind::Linear)
                .cloned()
                .collect(),
        }
    }

    /// JSON export mirroring the graph structure.
    pub fn to_json_string(&self) -> String {
        let raw = RawGraph {
            n_tokens: self.n_tokens(),
            tokens: self.tokens.clone(),
            edges: self.edges.clone(),
        };
        serde_json::to_string(&raw).expect("graph serialization cannot fail")
    }

    pub fn from_json_str(source: &str) -> Result<DependencyGraph, GraphReadError> {
        let raw: RawGraph = serde_json::from_str(source)?;
        if raw.n_tokens != raw.tokens.len() {
            return Err(GraphReadError::Inconsistent(format!(
                "n_tokens is {} but {} tokens are listed",
                raw.n_tokens,
                raw.tokens.len()
            )));
        }
        for edge in &raw.edges {
            if edge.governor >= raw.n_tokens || edge.dependent >= raw.n_tokens {
                return Err(GraphReadError::Inconsistent(format!(
                    "edge {} -> {} out of range",
                    edge.governor, edge.dependent
                )));
            }
        }
        Ok(DependencyGraph {
            tokens: raw.tokens,
            edges: raw.edges,
        })
    }

    /// TSV export, one row per token: 1-based index, form, and a `|`-joined
    /// list of `governor:label:kind` entries (`0:root` for governor-less
    /// tokens).
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, form) in self.tokens.iter().enumerate() {
            let mut govs: Vec<&Dependency> = self.governors_of(i).collect();
            govs.sort_by(|a, b| {
                (a.governor, a.kind, &a.label).cmp(&(b.governor, b.kind, &b.label))
            });
            let cell = if govs.is_empty() {
                "0:root".to_string()
            } else {
                govs.iter()
                    .map(|e| format!("{}:{}:{}", e.governor + 1, e.label, e.kind))
                    .collect::<Vec<_>>()
                    .join("|")
            };
            out.push_str(&format!("{}\t{}\t{}\n", i + 1, form, cell));
        }
        out
    }

    /// DOT export: tokens on one rank in sentence order, linear edges solid,
    /// non-linear edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph dependencies {\n");
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=none];\n");
        out.push_str("  { rank=same;");
        for (i, form) in self.tokens.iter().enumerate() {
            out.push_str(&format!(" t{} [label=\"{}\"];", i + 1, escape(form)));
        }
        out.push_str(" }\n");
        for i in 1..self.tokens.len() {
            out.push_str(&format!(
                "  t{} -> t{} [style=invis, weight=100];\n",
                i,
                i + 1
            ));
        }
        let mut edges: Vec<&Dependency> = self.edges.iter().collect();
        edges.sort();
        for edge in edges {
            let style = match edge.kind {
                DepKind::Linear => "",
                DepKind::NonLinear => ", style=dashed",
            };
            out.push_str(&format!(
                "  t{} -> t{} [label=\"{}\", constraint=false{}];\n",
                edge.governor + 1,
                edge.dependent + 1,
                escape(&edge.label),
                style
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Reads the dependencies off a model: one linear edge per `+`/`-`
/// saturation between distinct words, one non-linear edge per
/// dependency-virtual node saturated by another word's node.
pub fn extract(model: &ParseModel) -> DependencyGraph {
    let mut edges = Vec::new();
    for node in &model.nodes {
        let by_pol = |want: Polarity| -> Vec<&ModelMember> {
            node.members.iter().filter(|m| m.polarity == want).collect()
        };
        let pos = by_pol(Polarity::Positive);
        let neg = by_pol(Polarity::Negative);
        let sat = by_pol(Polarity::Saturated);
        let virtual_deps = by_pol(Polarity::VirtualDep);

        // The governor of the set's non-linear edges: the positive node's
        // owner in a linear interaction, the saturated node's owner
        // otherwise.
        let nonlinear_governor = if pos.len() == 1 && neg.len() == 1 {
            if neg[0].token != pos[0].token {
                edges.push(Dependency {
                    governor: neg[0].token,
                    dependent: pos[0].token,
                    label: node.cat.clone(),
                    kind: DepKind::Linear,
                    site: node.id,
                });
            }
            Some(pos[0].token)
        } else {
            sat.first().map(|m| m.token)
        };
        if let Some(governor) = nonlinear_governor {
            for v in virtual_deps {
                if v.token != governor {
                    edges.push(Dependency {
                        governor,
                        dependent: v.token,
                        label: node.cat.clone(),
                        kind: DepKind::NonLinear,
                        site: node.id,
                    });
                }
            }
        }
    }
    DependencyGraph {
        tokens: model.tokens.clone(),
        edges,
    }
}

/// Replaces each edge label by the `funct` feature of its saturation site
/// when the unified feature structure binds one; other labels are kept.
pub fn relabel_with_functions(graph: &DependencyGraph, model: &ParseModel) -> DependencyGraph {
    let functs: BTreeMap<usize, &str> = model
        .nodes
        .iter()
        .filter_map(|n| n.features.atom("funct").map(|f| (n.id, f)))
        .collect();
    DependencyGraph {
        tokens: graph.tokens.clone(),
        edges: graph
            .edges
            .iter()
            .map(|e| {
                let mut edge = e.clone();
                if let Some(funct) = functs.get(&e.site) {
                    edge.label = funct.to_string();
                }
                edge
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::description::FeatureStructure;
    use crate::engine::{parse_all, ModelNode, SearchLimits};
    use crate::grammar::{tokenize, GrammarLexicon};
    use crate::polarity::Polarity;

    fn parse_one(sentence: &str) -> ParseModel {
        let grammar = GrammarLexicon::from_str(assets::TOY_GRAMMAR).unwrap();
        let outcome = parse_all(&grammar, &tokenize(sentence), SearchLimits::default()).unwrap();
        assert_eq!(outcome.models.len(), 1, "{sentence}");
        outcome.models.into_iter().next().unwrap()
    }

    fn edge_set(graph: &DependencyGraph) -> Vec<(usize, usize, String, DepKind)> {
        let mut out: Vec<_> = graph
            .edges
            .iter()
            .map(|e| (e.governor, e.dependent, e.label.clone(), e.kind))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn running_example_extracts_the_expected_graph() {
        // jean(0) en(1) connaît(2) la(3) couleur(4)
        let model = parse_one("jean en connaît la couleur");
        let graph = extract(&model);
        assert_eq!(
            edge_set(&graph),
            vec![
                (2, 0, "NP".to_string(), DepKind::Linear),
                (2, 4, "NP".to_string(), DepKind::Linear),
                (4, 1, "NP".to_string(), DepKind::NonLinear),
                (4, 3, "DET".to_string(), DepKind::Linear),
            ]
        );
    }

    #[test]
    fn linear_projection_isolates_the_clitic() {
        let model = parse_one("jean en connaît la couleur");
        let linear = extract(&model).linear_projection();
        assert_eq!(linear.edges.len(), 3);
        let en = 1;
        let degree = linear
            .edges
            .iter()
            .filter(|e| e.governor == en || e.dependent == en)
            .count();
        assert_eq!(degree, 0);
    }

    #[test]
    fn clitic_pronoun_extracts_one_linear_object_edge() {
        // jean(0) le(1) connaît(2)
        let model = parse_one("jean le connaît");
        let graph = extract(&model);
        assert_eq!(
            edge_set(&graph),
            vec![
                (2, 0, "NP".to_string(), DepKind::Linear),
                (2, 1, "NP".to_string(), DepKind::Linear),
            ]
        );
        assert!(graph.edges.iter().all(|e| e.kind == DepKind::Linear));
    }

    #[test]
    fn relabeling_uses_funct_features() {
        let model = parse_one("jean en connaît la couleur");
        let graph = relabel_with_functions(&extract(&model), &model);
        assert_eq!(
            edge_set(&graph),
            vec![
                (2, 0, "subj".to_string(), DepKind::Linear),
                (2, 4, "obj".to_string(), DepKind::Linear),
                (4, 1, "NP".to_string(), DepKind::NonLinear),
                (4, 3, "det".to_string(), DepKind::Linear),
            ]
        );
    }

    #[test]
    fn relabeling_an_empty_graph_is_identity() {
        let model = parse_one("jean le connaît");
        let mut graph = extract(&model);
        graph.edges.clear();
        let relabeled = relabel_with_functions(&graph, &model);
        assert!(relabeled.edges.is_empty());
    }

    fn synthetic_node(id: usize, cat: &str, members: Vec<(usize, &str, Polarity)>) -> ModelNode {
        ModelNode {
            id,
            cat: cat.to_string(),
            children: Vec::new(),
            members: members
                .into_iter()
                .map(|(token, node_id, polarity)| ModelMember {
                    token,
                    node_id: node_id.to_string(),
                    polarity,
                })
                .collect(),
            features: FeatureStructure::new(),
            anchor_token: None,
            empty: false,
        }
    }

    fn synthetic_model(nodes: Vec<ModelNode>, n_tokens: usize) -> ParseModel {
        ParseModel {
            nodes,
            tokens: (0..n_tokens).map(|i| format!("w{i}")).collect(),
            entry_indices: vec![0; n_tokens],
            yield_order: (0..n_tokens).collect(),
        }
    }

    #[test]
    fn saturated_set_without_virtuals_yields_no_edge() {
        let model = synthetic_model(
            vec![synthetic_node(0, "PP", vec![(0, "J", Polarity::Saturated)])],
            1,
        );
        assert!(extract(&model).edges.is_empty());
    }

    #[test]
    fn saturated_set_with_several_virtuals_yields_one_edge_each() {
        let model = synthetic_model(
            vec![synthetic_node(
                0,
                "N",
                vec![
                    (0, "X", Polarity::Saturated),
                    (1, "Y", Polarity::VirtualDep),
                    (2, "Z", Polarity::VirtualDep),
                    (2, "W", Polarity::VirtualCtx),
                ],
            )],
            3,
        );
        let graph = extract(&model);
        assert_eq!(
            edge_set(&graph),
            vec![
                (0, 1, "N".to_string(), DepKind::NonLinear),
                (0, 2, "N".to_string(), DepKind::NonLinear),
            ]
        );
    }

    #[test]
    fn intra_word_saturation_yields_no_edge() {
        let model = synthetic_model(
            vec![synthetic_node(
                0,
                "NP",
                vec![(0, "A", Polarity::Positive), (0, "B", Polarity::Negative)],
            )],
            1,
        );
        assert!(extract(&model).edges.is_empty());
    }

    #[test]
    fn tsv_rows_match_the_wire_format() {
        let model = parse_one("jean en connaît la couleur");
        let tsv = extract(&model).to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "5\tcouleur\t3:NP:linear");
        assert_eq!(lines[1], "2\ten\t5:NP:nonlinear");
        assert_eq!(lines[2], "3\tconnaît\t0:root");
    }

    #[test]
    fn json_round_trips() {
        let model = parse_one("jean en connaît la couleur");
        let graph = extract(&model);
        let reloaded = DependencyGraph::from_json_str(&graph.to_json_string()).unwrap();
        assert_eq!(graph, reloaded);
    }

    #[test]
    fn inconsistent_json_is_rejected() {
        let bad = r#"{"n_tokens": 1, "tokens": ["a"], "edges":
            [{"governor": 0, "dependent": 5, "label": "X", "kind": "linear", "site": 0}]}"#;
        assert!(matches!(
            DependencyGraph::from_json_str(bad),
            Err(GraphReadError::Inconsistent(_))
        ));
    }

    #[test]
    fn dot_styles_by_kind() {
        let model = parse_one("jean en connaît la couleur");
        let dot = extract(&model).to_dot();
        assert!(dot.contains("t3 -> t1 [label=\"NP\", constraint=false];"));
        assert!(dot.contains("t5 -> t2 [label=\"NP\", constraint=false, style=dashed];"));
        assert!(dot.contains("{ rank=same;"));
    }

    #[test]
    fn edge_counts_match_the_merge_map() {
        for sentence in ["jean en connaît la couleur", "la fille que jean aime vient"] {
            let model = parse_one(sentence);
            let graph = extract(&model);
            let linear_sites = model
                .nodes
                .iter()
                .filter(|n| {
                    let pos = n.members.iter().find(|m| m.polarity == Polarity::Positive);
                    let neg = n.members.iter().find(|m| m.polarity == Polarity::Negative);
                    matches!((pos, neg), (Some(p), Some(q)) if p.token != q.token)
                })
                .count();
            assert_eq!(
                graph
                    .edges
                    .iter()
                    .filter(|e| e.kind == DepKind::Linear)
                    .count(),
                linear_sites,
                "{sentence}"
            );
        }
    }
}
