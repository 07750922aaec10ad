//! Structural classification of dependency graphs.
//!
//! The central notion is a word's reach: the set of tokens reachable from it
//! along directed edges, the word included. A graph is projective when every
//! reach is one contiguous segment of the sentence; the block-degree is the
//! largest number of contiguous segments any reach splits into; and a graph
//! is well-nested when no two disjoint reaches interleave. All metrics are
//! defined on the graph alone, so they also apply to externally supplied
//! graphs.

use serde::Serialize;
use thiserror::Error;

use crate::deps::DependencyGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("token index {index} out of range for {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
}

/// The reach of a word: members are sorted ascending, blocks are the maximal
/// runs of consecutive indices, as inclusive `(from, to)` intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reach {
    pub word: usize,
    pub members: Vec<usize>,
    pub blocks: Vec<(usize, usize)>,
}

fn forward_closure(graph: &DependencyGraph, start: usize) -> Vec<usize> {
    let n = graph.n_tokens();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for edge in &graph.edges {
        out_edges[edge.governor].push(edge.dependent);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &out_edges[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

fn blocks_of(members: &[usize]) -> Vec<(usize, usize)> {
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for &m in members {
        match blocks.last_mut() {
            Some((_, hi)) if *hi + 1 == m => *hi = m,
            _ => blocks.push((m, m)),
        }
    }
    blocks
}

/// Forward reachability closure of `word`, including the word itself.
pub fn reach(graph: &DependencyGraph, word: usize) -> Result<Reach, MetricsError> {
    if word >= graph.n_tokens() {
        return Err(MetricsError::IndexOutOfRange {
            index: word,
            len: graph.n_tokens(),
        });
    }
    let members = forward_closure(graph, word);
    let blocks = blocks_of(&members);
    Ok(Reach {
        word,
        members,
        blocks,
    })
}

/// True iff the underlying undirected graph is connected. Graphs with at
/// most one token count as connected.
pub fn is_connected(graph: &DependencyGraph) -> bool {
    let n = graph.n_tokens();
    if n <= 1 {
        return true;
    }
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); n];
    for edge in &graph.edges {
        adjacent[edge.governor].push(edge.dependent);
        adjacent[edge.dependent].push(edge.governor);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adjacent[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Maximum number of contiguous segments in any word's reach. `1` means the
/// graph is projective; the empty graph reports `0`.
pub fn block_degree(graph: &DependencyGraph) -> usize {
    (0..graph.n_tokens())
        .map(|w| blocks_of(&forward_closure(graph, w)).len())
        .max()
        .unwrap_or(0)
}

/// True iff every word's reach is one contiguous segment of the sentence.
/// Deliberately computed without [`block_degree`]; the two are cross-checked
/// in tests.
pub fn is_projective(graph: &DependencyGraph) -> bool {
    (0..graph.n_tokens()).all(|w| {
        let members = forward_closure(graph, w);
        match (members.first(), members.last()) {
            (Some(&lo), Some(&hi)) => hi - lo + 1 == members.len(),
            _ => true,
        }
    })
}

/// Well-nestedness report. Only pairs of words with disjoint reaches can
/// cross; pairs whose reaches partially overlap (neither disjoint nor
/// contained, impossible in trees but possible here) are exempt and listed
/// separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellNestedness {
    pub well_nested: bool,
    /// Word pairs whose disjoint reaches interleave.
    pub crossings: Vec<(usize, usize)>,
    /// Word pairs whose reaches partially overlap.
    pub overlap_pairs: Vec<(usize, usize)>,
}

/// True iff the two sorted disjoint sets interleave, i.e. the merged index
/// sequence alternates at least a..b..a..b.
fn interleaves(a: &[usize], b: &[usize]) -> bool {
    let mut switches = 0;
    let mut last: Option<bool> = None;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x < y,
            (Some(_), None) => true,
            _ => false,
        };
        if Some(take_a) != last {
            if last.is_some() {
                switches += 1;
            }
            last = Some(take_a);
        }
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
    switches >= 3
}

pub fn well_nestedness(graph: &DependencyGraph) -> WellNestedness {
    let n = graph.n_tokens();
    let reaches: Vec<Vec<usize>> = (0..n).map(|w| forward_closure(graph, w)).collect();
    let mut crossings = Vec::new();
    let mut overlap_pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (&reaches[u], &reaches[v]);
            let disjoint = a.iter().all(|x| !b.contains(x));
            if disjoint {
                if interleaves(a, b) {
                    crossings.push((u, v));
                }
            } else {
                let a_in_b = a.iter().all(|x| b.contains(x));
                let b_in_a = b.iter().all(|x| a.contains(x));
                if !a_in_b && !b_in_a {
                    overlap_pairs.push((u, v));
                }
            }
        }
    }
    WellNestedness {
        well_nested: crossings.is_empty(),
        crossings,
        overlap_pairs,
    }
}

/// True iff no two words with disjoint reaches interleave.
pub fn is_well_nested(graph: &DependencyGraph) -> bool {
    well_nestedness(graph).well_nested
}

/// Flat summary record of all metrics. `worst_word` is the (zero-based)
/// token whose reach splits into the most blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsReport {
    pub connected: bool,
    pub projective: bool,
    pub block_degree: usize,
    pub well_nested: bool,
    pub worst_word: Option<usize>,
    pub worst_blocks: Option<usize>,
}

impl MetricsReport {
    pub fn of(graph: &DependencyGraph) -> MetricsReport {
        let worst = (0..graph.n_tokens())
            .map(|w| (w, blocks_of(&forward_closure(graph, w)).len()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        MetricsReport {
            connected: is_connected(graph),
            projective: is_projective(graph),
            block_degree: block_degree(graph),
            well_nested: is_well_nested(graph),
            worst_word: worst.map(|(w, _)| w),
            worst_blocks: worst.map(|(_, b)| b),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}
