//! Independent re-check of every model invariant, used to audit what the
//! search and the oracle return. Works from the grammar and the model alone,
//! without any of the search's bookkeeping.

use std::collections::BTreeMap;

use crate::description::{unify_into, Bindings, Phon, Term};
use crate::grammar::{GrammarLexicon, LexicalSelection};
use crate::polarity::is_saturation_valid;

use super::{FlatSelection, ParseModel, VarKey};

/// Checks that `model` is a sound analysis of `tokens` under `grammar`:
/// the merge sets partition the selected descriptions' nodes, every set
/// saturates with one category and consistent features, the tree realises
/// all declared relations, and the anchors spell the sentence in order.
/// Returns the list of violated conditions, empty on success.
pub fn verify_model(
    grammar: &GrammarLexicon,
    tokens: &[String],
    model: &ParseModel,
) -> Result<(), Vec<String>> {
    let mut problems: Vec<String> = Vec::new();

    if model.tokens != tokens {
        problems.push(format!(
            "model tokens {:?} differ from input {:?}",
            model.tokens, tokens
        ));
        return Err(problems);
    }
    if model.entry_indices.len() != tokens.len() {
        problems.push("entry_indices length differs from token count".to_string());
        return Err(problems);
    }
    let mut picks = Vec::with_capacity(tokens.len());
    for (token, word) in tokens.iter().enumerate() {
        let entries = match grammar.entries_for(word) {
            Some(entries) => entries,
            None => {
                problems.push(format!("token {token} `{word}` not in lexicon"));
                return Err(problems);
            }
        };
        match entries.get(model.entry_indices[token]) {
            Some(dap) => picks.push(dap),
            None => {
                problems.push(format!(
                    "token {token} `{word}` has no entry {}",
                    model.entry_indices[token]
                ));
                return Err(problems);
            }
        }
    }
    let selection = LexicalSelection {
        picks,
        entry_indices: model.entry_indices.clone(),
    };
    let flat = FlatSelection::build(&selection, tokens);

    // Tree shape: ids in range, node 0 the root, every other node exactly
    // one parent.
    let mut parent_of: Vec<Option<usize>> = vec![None; model.nodes.len()];
    for node in &model.nodes {
        for &child in &node.children {
            if child >= model.nodes.len() {
                problems.push(format!("node {} has out-of-range child {child}", node.id));
                return Err(problems);
            }
            if parent_of[child].is_some() || child == 0 {
                problems.push(format!(
                    "node {child} has more than one parent or is the root"
                ));
            }
            parent_of[child] = Some(node.id);
        }
    }
    for (id, parent) in parent_of.iter().enumerate() {
        if id != 0 && parent.is_none() {
            problems.push(format!("node {id} is disconnected from the root"));
        }
    }
    if !problems.is_empty() {
        return Err(problems);
    }

    // Partition: every description node of the selection in exactly one
    // merge set, with the declared polarity.
    let mut assignment: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for node in &model.nodes {
        if node.members.is_empty() {
            problems.push(format!("node {} has an empty merge set", node.id));
        }
        for member in &node.members {
            if assignment
                .insert((member.token, member.node_id.as_str()), node.id)
                .is_some()
            {
                problems.push(format!("description node {member} appears twice"));
            }
        }
    }
    let mut flat_of_member: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for (i, fnode) in flat.nodes.iter().enumerate() {
        flat_of_member.insert((fnode.token, fnode.local_id.as_str()), i);
        if !assignment.contains_key(&(fnode.token, fnode.local_id.as_str())) {
            problems.push(format!(
                "description node {}:{} of the selection is unassigned",
                fnode.token, fnode.local_id
            ));
        }
    }
    for node in &model.nodes {
        for member in &node.members {
            match flat_of_member.get(&(member.token, member.node_id.as_str())) {
                None => problems.push(format!("{member} is not a node of the selection")),
                Some(&i) => {
                    if flat.nodes[i].polarity != member.polarity {
                        problems.push(format!(
                            "{member} carries polarity {} but the description says {}",
                            member.polarity, flat.nodes[i].polarity
                        ));
                    }
                }
            }
        }
    }
    if !problems.is_empty() {
        return Err(problems);
    }

    let member_flat = |node: &super::ModelNode| -> Vec<usize> {
        node.members
            .iter()
            .map(|m| flat_of_member[&(m.token, m.node_id.as_str())])
            .collect()
    };

    // Saturation validity, category equality, feature unification.
    let mut bindings: Bindings<VarKey> = Bindings::new();
    for node in &model.nodes {
        let members = member_flat(node);
        if !is_saturation_valid(members.iter().map(|&i| flat.nodes[i].polarity)) {
            problems.push(format!("node {} is not saturation-valid", node.id));
        }
        if members.iter().any(|&i| flat.nodes[i].cat != node.cat) {
            problems.push(format!("node {} mixes categories", node.id));
        }
        let mut feats: BTreeMap<String, Term<VarKey>> = BTreeMap::new();
        for &i in &members {
            if unify_into(&mut feats, &flat.nodes[i].feats, &mut bindings).is_err() {
                problems.push(format!("node {} has clashing features", node.id));
                break;
            }
        }
        let anchors = members
            .iter()
            .filter(|&&i| flat.nodes[i].phon == Phon::Anchor)
            .count();
        if anchors > 1 {
            problems.push(format!("node {} fuses two anchors", node.id));
        }
        let expected_anchor = members
            .iter()
            .find(|&&i| flat.nodes[i].phon == Phon::Anchor)
            .map(|&i| flat.nodes[i].token);
        if node.anchor_token != expected_anchor {
            problems.push(format!("node {} misreports its anchor", node.id));
        }
        if (anchors > 0 || node.empty) && !node.children.is_empty() {
            problems.push(format!("node {} should be a leaf", node.id));
        }
        if node.empty && anchors > 0 {
            problems.push(format!("node {} is both empty and anchored", node.id));
        }
    }

    // Declared relations hold of the images.
    let image =
        |i: usize| -> usize { assignment[&(flat.nodes[i].token, flat.nodes[i].local_id.as_str())] };
    for (i, fnode) in flat.nodes.iter().enumerate() {
        if let Some(p) = fnode.parent {
            if parent_of[image(i)] != Some(image(p)) {
                problems.push(format!(
                    "parenthood {}:{} -> {}:{} is not realised",
                    flat.nodes[p].token, flat.nodes[p].local_id, fnode.token, fnode.local_id
                ));
            }
        }
        let declared = &fnode.children;
        for w in 0..declared.len().saturating_sub(1) {
            let (a, b) = (image(declared[w]), image(declared[w + 1]));
            let siblings = &model.nodes[image(i)].children;
            let pa = siblings.iter().position(|&c| c == a);
            let pb = siblings.iter().position(|&c| c == b);
            match (pa, pb) {
                (Some(pa), Some(pb)) if pa < pb => {}
                _ => problems.push(format!(
                    "sibling order of {}:{} is not realised",
                    fnode.token, fnode.local_id
                )),
            }
        }
    }
    for &(anc, desc) in &flat.dominance {
        let target = image(anc);
        let mut cur = image(desc);
        let mut ok = cur == target;
        while let Some(p) = parent_of[cur] {
            if p == target {
                ok = true;
                break;
            }
            cur = p;
        }
        if !ok {
            problems.push(format!(
                "dominance {}:{} over {}:{} is not realised",
                flat.nodes[anc].token,
                flat.nodes[anc].local_id,
                flat.nodes[desc].token,
                flat.nodes[desc].local_id
            ));
        }
    }

    // Yield: anchors left-to-right spell 0..n-1; precedence constraints
    // compare whole subtree yields.
    let mut yield_seq = Vec::new();
    let mut subtree: Vec<Vec<usize>> = vec![Vec::new(); model.nodes.len()];
    fn walk(
        model: &ParseModel,
        id: usize,
        yield_seq: &mut Vec<usize>,
        subtree: &mut Vec<Vec<usize>>,
    ) {
        let mut mine = Vec::new();
        if let Some(token) = model.nodes[id].anchor_token {
            yield_seq.push(token);
            mine.push(token);
        }
        for &child in &model.nodes[id].children {
            walk(model, child, yield_seq, subtree);
            mine.extend(subtree[child].iter().copied());
        }
        subtree[id] = mine;
    }
    walk(model, 0, &mut yield_seq, &mut subtree);
    let expected: Vec<usize> = (0..tokens.len()).collect();
    if yield_seq != expected {
        problems.push(format!(
            "anchor yield is {yield_seq:?}, not the input order"
        ));
    }
    if model.yield_order != expected {
        problems.push(format!(
            "yield_order is {:?}, not the identity",
            model.yield_order
        ));
    }
    for &(l, r) in &flat.precedence {
        let left = &subtree[image(l)];
        let right = &subtree[image(r)];
        if let (Some(&hi), Some(&lo)) = (left.iter().max(), right.iter().min()) {
            if hi >= lo {
                problems.push(format!(
                    "precedence {}:{} before {}:{} is not realised",
                    flat.nodes[l].token,
                    flat.nodes[l].local_id,
                    flat.nodes[r].token,
                    flat.nodes[r].local_id
                ));
            }
        }
    }

    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}
