//! Exhaustive ground-truth parser for desk-scale inputs.
//!
//! Enumerates every partition of the selection's description nodes into
//! merge sets outright, filters by saturation validity, category equality,
//! feature unification and tree-constraint satisfiability, and materialises
//! the survivors. No search heuristics are shared with the backtracking
//! engine; on its (capped) domain the two must return the same model sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::description::{unify_into, Bindings, Phon, Term};
use crate::grammar::GrammarLexicon;
use crate::polarity::{is_saturation_valid, Polarity};

use super::{assemble_model, EngineError, FlatSelection, ParseModel, VarKey};

/// Hard cap on the number of description nodes a selection may have before
/// partition enumeration is refused.
pub const ORACLE_NODE_CAP: usize = 14;

/// Enumerates all models by brute force. Errors when any lexical selection
/// holds more than [`ORACLE_NODE_CAP`] description nodes.
pub fn oracle_parse(
    grammar: &GrammarLexicon,
    tokens: &[String],
) -> Result<Vec<ParseModel>, EngineError> {
    let mut models: Vec<ParseModel> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for selection in grammar.lexical_selections(tokens)? {
        let flat = FlatSelection::build(&selection, tokens);
        if flat.nodes.len() > ORACLE_NODE_CAP {
            return Err(EngineError::OracleCapExceeded {
                nodes: flat.nodes.len(),
                cap: ORACLE_NODE_CAP,
            });
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        enumerate_partitions(&flat, 0, &mut blocks, &mut |blocks| {
            realize_partition(&flat, blocks, &mut models, &mut seen);
        });
    }

    models.sort_by_key(ParseModel::canonical);
    Ok(models)
}

/// Recursive set-partition enumeration with pruning limited to provably
/// necessary block conditions: one category per block, one node per token,
/// at most one `+`, `-`, `=` and one anchor.
fn enumerate_partitions(
    flat: &FlatSelection,
    node: usize,
    blocks: &mut Vec<Vec<usize>>,
    emit: &mut impl FnMut(&[Vec<usize>]),
) {
    if node == flat.nodes.len() {
        emit(blocks);
        return;
    }
    for i in 0..blocks.len() {
        if block_accepts(flat, &blocks[i], node) {
            blocks[i].push(node);
            enumerate_partitions(flat, node + 1, blocks, emit);
            blocks[i].pop();
        }
    }
    blocks.push(vec![node]);
    enumerate_partitions(flat, node + 1, blocks, emit);
    blocks.pop();
}

fn block_accepts(flat: &FlatSelection, block: &[usize], node: usize) -> bool {
    let incoming = &flat.nodes[node];
    let mut pos = usize::from(incoming.polarity == Polarity::Positive);
    let mut neg = usize::from(incoming.polarity == Polarity::Negative);
    let mut sat = usize::from(incoming.polarity == Polarity::Saturated);
    let mut anchors = usize::from(incoming.phon == Phon::Anchor);
    for &m in block {
        let member = &flat.nodes[m];
        if member.cat != incoming.cat || member.token == incoming.token {
            return false;
        }
        match member.polarity {
            Polarity::Positive => pos += 1,
            Polarity::Negative => neg += 1,
            Polarity::Saturated => sat += 1,
            _ => {}
        }
        if member.phon == Phon::Anchor {
            anchors += 1;
        }
    }
    pos <= 1 && neg <= 1 && sat <= 1 && !(sat == 1 && pos + neg > 0) && anchors <= 1
}

/// Full validity check of one partition, followed by materialisation of
/// every tree ordering it admits.
fn realize_partition(
    flat: &FlatSelection,
    blocks: &[Vec<usize>],
    models: &mut Vec<ParseModel>,
    seen: &mut BTreeSet<String>,
) {
    let n = blocks.len();
    let mut block_of = vec![0usize; flat.nodes.len()];
    for (b, members) in blocks.iter().enumerate() {
        for &m in members {
            block_of[m] = b;
        }
    }

    // Every block must saturate.
    for members in blocks {
        if !is_saturation_valid(members.iter().map(|&m| flat.nodes[m].polarity)) {
            return;
        }
    }

    // Feature structures must unify, under one shared variable store.
    let mut bindings: Bindings<VarKey> = Bindings::new();
    let mut block_feats: Vec<BTreeMap<String, Term<VarKey>>> = Vec::with_capacity(n);
    for members in blocks {
        let mut feats = BTreeMap::new();
        for &m in members {
            if unify_into(&mut feats, &flat.nodes[m].feats, &mut bindings).is_err() {
                return;
            }
        }
        block_feats.push(feats);
    }

    // Anchors and empty nodes must be leaves: no member of their block may
    // declare children.
    for members in blocks {
        let phonic = members
            .iter()
            .any(|&m| flat.nodes[m].phon != Phon::Internal);
        let empty = members.iter().any(|&m| flat.nodes[m].phon == Phon::Empty);
        let anchored = members.iter().any(|&m| flat.nodes[m].phon == Phon::Anchor);
        let has_kids = members.iter().any(|&m| !flat.nodes[m].children.is_empty());
        if (phonic && has_kids) || (empty && anchored) {
            return;
        }
    }

    // All declared parents of a block's members must land in one block, the
    // parent relation must be acyclic, and exactly one block may be a root.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (b, members) in blocks.iter().enumerate() {
        for &m in members {
            if let Some(p) = flat.nodes[m].parent {
                let pb = block_of[p];
                match parent[b] {
                    None => parent[b] = Some(pb),
                    Some(existing) if existing != pb => return,
                    _ => {}
                }
            }
        }
    }
    let mut roots = Vec::new();
    for (b, p) in parent.iter().enumerate() {
        if p.is_none() {
            roots.push(b);
        }
        let mut visited = BTreeSet::new();
        let mut cur = b;
        while let Some(next) = parent[cur] {
            if !visited.insert(cur) {
                return;
            }
            cur = next;
        }
    }
    if roots.len() != 1 {
        return;
    }
    let root = roots[0];

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(b);
        }
    }

    // Declared sibling orders, as before/after pairs between blocks.
    let mut order_pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (b, members) in blocks.iter().enumerate() {
        for &m in members {
            let declared = &flat.nodes[m].children;
            for i in 0..declared.len() {
                for j in i + 1..declared.len() {
                    let (bi, bj) = (block_of[declared[i]], block_of[declared[j]]);
                    if bi == bj {
                        return;
                    }
                    order_pairs[b].push((bi, bj));
                }
            }
        }
    }

    // Try every permissible permutation of every block's children.
    let ordered: Vec<usize> = (0..n).filter(|&b| !children[b].is_empty()).collect();
    let mut chosen: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    try_orders(
        flat,
        blocks,
        root,
        &children,
        &order_pairs,
        &ordered,
        0,
        &mut chosen,
        &bindings,
        &block_feats,
        models,
        seen,
    );
}

#[allow(clippy::too_many_arguments)]
fn try_orders(
    flat: &FlatSelection,
    blocks: &[Vec<usize>],
    root: usize,
    children: &[Vec<usize>],
    order_pairs: &[Vec<(usize, usize)>],
    ordered: &[usize],
    depth: usize,
    chosen: &mut BTreeMap<usize, Vec<usize>>,
    bindings: &Bindings<VarKey>,
    block_feats: &[BTreeMap<String, Term<VarKey>>],
    models: &mut Vec<ParseModel>,
    seen: &mut BTreeSet<String>,
) {
    if depth == ordered.len() {
        check_ordered_tree(
            flat,
            blocks,
            root,
            chosen,
            bindings,
            block_feats,
            models,
            seen,
        );
        return;
    }
    let block = ordered[depth];
    for perm in permutations(&children[block]) {
        let consistent = order_pairs[block].iter().all(|&(before, after)| {
            let pi = perm.iter().position(|&x| x == before);
            let pj = perm.iter().position(|&x| x == after);
            match (pi, pj) {
                (Some(pi), Some(pj)) => pi < pj,
                _ => true,
            }
        });
        if !consistent {
            continue;
        }
        chosen.insert(block, perm);
        try_orders(
            flat,
            blocks,
            root,
            children,
            order_pairs,
            ordered,
            depth + 1,
            chosen,
            bindings,
            block_feats,
            models,
            seen,
        );
    }
    chosen.remove(&block);
}

#[allow(clippy::too_many_arguments)]
fn check_ordered_tree(
    flat: &FlatSelection,
    blocks: &[Vec<usize>],
    root: usize,
    orders: &BTreeMap<usize, Vec<usize>>,
    bindings: &Bindings<VarKey>,
    block_feats: &[BTreeMap<String, Term<VarKey>>],
    models: &mut Vec<ParseModel>,
    seen: &mut BTreeSet<String>,
) {
    let mut block_of = vec![0usize; flat.nodes.len()];
    for (b, members) in blocks.iter().enumerate() {
        for &m in members {
            block_of[m] = b;
        }
    }

    // In-order traversal: anchor yield and subtree token sets.
    let mut yield_seq = Vec::new();
    let mut subtree_tokens: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    fn walk(
        block: usize,
        flat: &FlatSelection,
        blocks: &[Vec<usize>],
        orders: &BTreeMap<usize, Vec<usize>>,
        yield_seq: &mut Vec<usize>,
        subtree_tokens: &mut Vec<Vec<usize>>,
    ) {
        let mut mine = Vec::new();
        if let Some(&anchor) = blocks[block]
            .iter()
            .find(|&&m| flat.nodes[m].phon == Phon::Anchor)
        {
            let token = flat.nodes[anchor].token;
            yield_seq.push(token);
            mine.push(token);
        }
        if let Some(kids) = orders.get(&block) {
            for &kid in kids {
                walk(kid, flat, blocks, orders, yield_seq, subtree_tokens);
                mine.extend(subtree_tokens[kid].iter().copied());
            }
        }
        subtree_tokens[block] = mine;
    }
    walk(
        root,
        flat,
        blocks,
        orders,
        &mut yield_seq,
        &mut subtree_tokens,
    );

    let expected: Vec<usize> = (0..flat.n_tokens()).collect();
    if yield_seq != expected {
        return;
    }

    for &(l, r) in &flat.precedence {
        let left = &subtree_tokens[block_of[l]];
        let right = &subtree_tokens[block_of[r]];
        if let (Some(&hi), Some(&lo)) = (left.iter().max(), right.iter().min()) {
            if hi >= lo {
                return;
            }
        }
    }

    let mut parents: Vec<Option<usize>> = vec![None; blocks.len()];
    for (&b, kids) in orders {
        for &kid in kids {
            parents[kid] = Some(b);
        }
    }
    for &(anc, desc) in &flat.dominance {
        let target = block_of[anc];
        let mut cur = block_of[desc];
        let mut ok = cur == target;
        while let Some(p) = parents[cur] {
            if p == target {
                ok = true;
                break;
            }
            cur = p;
        }
        if !ok {
            return;
        }
    }

    let model = assemble_model(flat, blocks, root, orders, bindings, |b| {
        block_feats[b].clone()
    });
    if seen.insert(model.canonical()) {
        models.push(model);
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
