//! Backtracking search over saturation events.
//!
//! Strategy: repeatedly pick the leftmost class whose composed polarity is
//! still `+` or `-` and branch over every compatible counterpart class; once
//! no poles are open, attach each remaining pure-virtual class to a
//! saturated class the same way. Merging propagates structure eagerly: when
//! two nodes fuse, their declared parents must fuse too, and any parenthood
//! cycle prunes the branch. Once every class is saturated the tree is
//! materialised: child orders are enumerated as linear extensions of the
//! declared sibling orders, then yield order, precedence and dominance are
//! checked.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::description::{unify_into, Bindings, Phon, Term};
use crate::grammar::GrammarLexicon;
use crate::polarity::{compose, is_saturation_valid, Polarity};

use super::{
    assemble_model, EngineError, EngineOptions, FlatSelection, ParseOutcome, PartialSaturation,
    SearchDiagnostic, SearchLimits, VarKey,
};

pub(crate) fn run(
    grammar: &GrammarLexicon,
    tokens: &[String],
    limits: SearchLimits,
    options: EngineOptions,
) -> Result<ParseOutcome, EngineError> {
    let started = Instant::now();
    let mut diagnostic = SearchDiagnostic::default();
    let mut models = Vec::new();
    let mut seen = BTreeSet::new();
    let mut best: Option<PartialSaturation> = None;

    for selection in grammar.lexical_selections(tokens)? {
        diagnostic.selections_tried += 1;
        let flat = FlatSelection::build(&selection, tokens);
        let mut search = Search {
            flat: &flat,
            limits,
            options,
            started,
            merges: &mut diagnostic.merges,
            models: &mut models,
            seen: &mut seen,
            best: &mut best,
        };
        let state = State::initial(&flat);
        if !search.explore(state)? {
            break;
        }
    }

    diagnostic.best_partial = best;
    Ok(ParseOutcome { models, diagnostic })
}

#[derive(Clone)]
struct ClassInfo {
    /// Member node indices, ascending.
    members: Vec<usize>,
    /// Composed polarity of the members.
    pol: Polarity,
    /// Tokens contributing members, ascending.
    tokens: Vec<usize>,
    anchor: bool,
    empty: bool,
    /// Some member has declared children.
    has_kids: bool,
    /// Any node whose declared parent this class must fuse with.
    parent: Option<usize>,
    feats: BTreeMap<String, Term<VarKey>>,
}

#[derive(Clone)]
struct State {
    class_of: Vec<usize>,
    classes: Vec<Option<ClassInfo>>,
    bindings: Bindings<VarKey>,
}

impl State {
    fn initial(flat: &FlatSelection) -> State {
        let classes = flat
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                Some(ClassInfo {
                    members: vec![i],
                    pol: node.polarity,
                    tokens: vec![node.token],
                    anchor: node.phon == Phon::Anchor,
                    empty: node.phon == Phon::Empty,
                    has_kids: !node.children.is_empty(),
                    parent: node.parent,
                    feats: node.feats.clone(),
                })
            })
            .collect();
        State {
            class_of: (0..flat.nodes.len()).collect(),
            classes,
            bindings: Bindings::new(),
        }
    }

    fn live(&self) -> impl Iterator<Item = (usize, &ClassInfo)> {
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(slot, c)| c.as_ref().map(|c| (slot, c)))
    }

    fn parent_slot(&self, slot: usize) -> Option<usize> {
        self.classes[slot]
            .as_ref()
            .unwrap()
            .parent
            .map(|node| self.class_of[node])
    }

    /// True when some parent chain loops, which no tree can realise.
    fn has_parent_cycle(&self) -> bool {
        for (slot, _) in self.live() {
            let mut visited = BTreeSet::new();
            let mut cur = slot;
            while let Some(parent) = self.parent_slot(cur) {
                if !visited.insert(cur) {
                    return true;
                }
                cur = parent;
            }
            if visited.contains(&cur) {
                return true;
            }
        }
        false
    }
}

struct Search<'a> {
    flat: &'a FlatSelection,
    limits: SearchLimits,
    options: EngineOptions,
    started: Instant,
    merges: &'a mut usize,
    models: &'a mut Vec<super::ParseModel>,
    seen: &'a mut BTreeSet<String>,
    best: &'a mut Option<PartialSaturation>,
}

impl<'a> Search<'a> {
    fn budget_error(&self) -> EngineError {
        EngineError::LimitExceeded {
            merges: *self.merges,
            elapsed_ms: self.started.elapsed().as_millis() as u64,
            max_merges: self.limits.max_merges,
            timeout_ms: self.limits.timeout_ms,
        }
    }

    fn check_budget(&mut self) -> Result<(), EngineError> {
        if *self.merges > self.limits.max_merges
            || self.started.elapsed().as_millis() as u64 >= self.limits.timeout_ms
        {
            return Err(self.budget_error());
        }
        Ok(())
    }

    /// Sort key of a class: smallest (token, node id) among its members.
    fn rep_key(&self, state: &State, slot: usize) -> (usize, &'a str) {
        state.classes[slot]
            .as_ref()
            .unwrap()
            .members
            .iter()
            .map(|&n| self.flat.sort_key(n))
            .min()
            .unwrap()
    }

    fn leftmost(&self, state: &State, want: impl Fn(Polarity) -> bool) -> Option<usize> {
        state
            .live()
            .filter(|(_, c)| want(c.pol))
            .min_by_key(|&(slot, _)| self.rep_key(state, slot))
            .map(|(slot, _)| slot)
    }

    /// Fuses the classes of two nodes, propagating forced parent fusions.
    /// `Ok(false)` prunes the branch; errors abort the whole search.
    fn merge(&mut self, state: &mut State, a: usize, b: usize) -> Result<bool, EngineError> {
        let mut work = vec![(a, b)];
        while let Some((na, nb)) = work.pop() {
            let ca = state.class_of[na];
            let cb = state.class_of[nb];
            if ca == cb {
                continue;
            }
            *self.merges += 1;
            self.check_budget()?;

            let (left, right) = {
                let left = state.classes[ca].as_ref().unwrap();
                let right = state.classes[cb].as_ref().unwrap();
                (left, right)
            };

            if !self.options.allow_intra_dap_merges
                && left.tokens.iter().any(|t| right.tokens.contains(t))
            {
                return Ok(false);
            }
            let cat_a = &self.flat.nodes[left.members[0]].cat;
            let cat_b = &self.flat.nodes[right.members[0]].cat;
            if cat_a != cat_b {
                return Ok(false);
            }
            let pol = match compose(left.pol, right.pol) {
                Some(pol) => pol,
                None => return Ok(false),
            };
            let anchor = left.anchor || right.anchor;
            let empty = left.empty || right.empty;
            let has_kids = left.has_kids || right.has_kids;
            if left.anchor && right.anchor {
                return Ok(false);
            }
            if anchor && empty {
                return Ok(false);
            }
            // Anchors and empty nodes sit at leaves of the final tree.
            if (anchor || empty) && has_kids {
                return Ok(false);
            }

            let right_feats = right.feats.clone();
            let right_members = right.members.clone();
            let right_tokens = right.tokens.clone();
            let right_parent = right.parent;

            let info = state.classes[ca].as_mut().unwrap();
            if unify_into(&mut info.feats, &right_feats, &mut state.bindings).is_err() {
                return Ok(false);
            }
            info.pol = pol;
            info.anchor = anchor;
            info.empty = empty;
            info.has_kids = has_kids;
            for m in right_members {
                info.members.push(m);
            }
            info.members.sort_unstable();
            for t in right_tokens {
                if !info.tokens.contains(&t) {
                    info.tokens.push(t);
                }
            }
            info.tokens.sort_unstable();
            match (info.parent, right_parent) {
                (Some(pa), Some(pb)) => work.push((pa, pb)),
                (None, Some(pb)) => info.parent = Some(pb),
                _ => {}
            }
            let members = state.classes[ca].as_ref().unwrap().members.clone();
            for &m in &members {
                state.class_of[m] = ca;
            }
            state.classes[cb] = None;
        }
        if state.has_parent_cycle() {
            return Ok(false);
        }
        Ok(true)
    }

    fn record_dead_end(&mut self, state: &State) {
        let mut open_poles = 0;
        let mut open_virtuals = 0;
        let mut total = 0;
        for (_, c) in state.live() {
            total += 1;
            match c.pol {
                Polarity::Positive | Polarity::Negative => open_poles += 1,
                p if p.is_virtual() => open_virtuals += 1,
                _ => {}
            }
        }
        let partial = PartialSaturation {
            saturated_classes: total - open_poles - open_virtuals,
            total_classes: total,
            open_poles,
            open_virtuals,
        };
        let better = match self.best {
            None => true,
            Some(best) => partial.openness() < best.openness(),
        };
        if better {
            *self.best = Some(partial);
        }
    }

    /// Candidate counterpart classes for `slot`, cheapest checks first, in
    /// deterministic order.
    fn candidates(
        &self,
        state: &State,
        slot: usize,
        want: impl Fn(Polarity) -> bool,
    ) -> Vec<usize> {
        let source = state.classes[slot].as_ref().unwrap();
        let cat = &self.flat.nodes[source.members[0]].cat;
        let mut found: Vec<usize> = state
            .live()
            .filter(|&(other, c)| {
                other != slot
                    && want(c.pol)
                    && &self.flat.nodes[c.members[0]].cat == cat
                    && (self.options.allow_intra_dap_merges
                        || !c.tokens.iter().any(|t| source.tokens.contains(t)))
                    && !(c.anchor && source.anchor)
            })
            .map(|(other, _)| other)
            .collect();
        found.sort_by_key(|&other| self.rep_key(state, other));
        if self.options.reverse_exploration {
            found.reverse();
        }
        found
    }

    /// Returns `Ok(false)` when enough models were found and the search can
    /// stop unwinding.
    fn explore(&mut self, state: State) -> Result<bool, EngineError> {
        self.check_budget()?;

        // Saturate open poles first, leftmost first.
        if let Some(slot) = self.leftmost(&state, |p| {
            matches!(p, Polarity::Positive | Polarity::Negative)
        }) {
            let want = match state.classes[slot].as_ref().unwrap().pol {
                Polarity::Positive => Polarity::Negative,
                _ => Polarity::Positive,
            };
            let partners = self.candidates(&state, slot, |p| p == want);
            let mut progressed = false;
            for partner in &partners {
                let mut next = state.clone();
                let (na, nb) = (
                    state.classes[slot].as_ref().unwrap().members[0],
                    state.classes[*partner].as_ref().unwrap().members[0],
                );
                if self.merge(&mut next, na, nb)? {
                    progressed = true;
                    if !self.explore(next)? {
                        return Ok(false);
                    }
                }
            }
            if !progressed {
                self.record_dead_end(&state);
            }
            return Ok(true);
        }

        // Then attach pure-virtual classes to saturated ones.
        if let Some(slot) = self.leftmost(&state, Polarity::is_virtual) {
            let targets = self.candidates(&state, slot, |p| p == Polarity::Saturated);
            let mut progressed = false;
            for target in &targets {
                let mut next = state.clone();
                let (na, nb) = (
                    state.classes[slot].as_ref().unwrap().members[0],
                    state.classes[*target].as_ref().unwrap().members[0],
                );
                if self.merge(&mut next, na, nb)? {
                    progressed = true;
                    if !self.explore(next)? {
                        return Ok(false);
                    }
                }
            }
            if !progressed {
                self.record_dead_end(&state);
            }
            return Ok(true);
        }

        self.materialize(&state)
    }

    /// Turns a fully saturated state into zero or more models.
    fn materialize(&mut self, state: &State) -> Result<bool, EngineError> {
        debug_assert!(state.live().all(|(_, c)| c.pol == Polarity::Saturated));
        debug_assert!(state.live().all(|(_, c)| {
            is_saturation_valid(c.members.iter().map(|&m| self.flat.nodes[m].polarity))
        }));

        // Anchors and empty nodes must end up at leaves. Merges enforce this
        // pairwise; classes that never merged are checked here.
        if state
            .live()
            .any(|(_, c)| (c.anchor || c.empty) && c.has_kids)
        {
            return Ok(true);
        }

        // Dense renumbering of the live classes.
        let slots: Vec<usize> = state.live().map(|(slot, _)| slot).collect();
        let dense: BTreeMap<usize, usize> =
            slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let classes: Vec<Vec<usize>> = slots
            .iter()
            .map(|&s| state.classes[s].as_ref().unwrap().members.clone())
            .collect();
        let parent: Vec<Option<usize>> = slots
            .iter()
            .map(|&s| state.parent_slot(s).map(|p| dense[&p]))
            .collect();

        let roots: Vec<usize> = (0..classes.len())
            .filter(|&c| parent[c].is_none())
            .collect();
        if roots.len() != 1 {
            self.record_dead_end(state);
            return Ok(true);
        }
        let root = roots[0];

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(c);
            }
        }
        for kids in &mut children {
            kids.sort_by_key(|&c| {
                classes[c]
                    .iter()
                    .map(|&n| self.flat.sort_key(n))
                    .min()
                    .unwrap()
            });
        }

        // Sibling order constraints from every member's declared child list.
        let mut constraints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); classes.len()];
        for (c, members) in classes.iter().enumerate() {
            for &m in members {
                let declared = &self.flat.nodes[m].children;
                for w in 0..declared.len().saturating_sub(1) {
                    let before = dense[&state.class_of[declared[w]]];
                    let after = dense[&state.class_of[declared[w + 1]]];
                    if before == after {
                        // Two declared siblings fused; no linear order exists.
                        return Ok(true);
                    }
                    constraints[c].push((before, after));
                }
            }
        }

        // Enumerate linear extensions per class, then their combinations.
        let mut per_class: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
        for (c, kids) in children.iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            let orders = linear_extensions(kids, &constraints[c]);
            if orders.is_empty() {
                self.record_dead_end(state);
                return Ok(true);
            }
            per_class.push((c, orders));
        }

        let mut chosen: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        self.assign_orders(state, &classes, root, &per_class, 0, &mut chosen)
    }

    fn assign_orders(
        &mut self,
        state: &State,
        classes: &[Vec<usize>],
        root: usize,
        per_class: &[(usize, Vec<Vec<usize>>)],
        depth: usize,
        chosen: &mut BTreeMap<usize, Vec<usize>>,
    ) -> Result<bool, EngineError> {
        if depth == per_class.len() {
            return self.finish(state, classes, root, chosen);
        }
        let (class, orders) = &per_class[depth];
        for order in orders {
            chosen.insert(*class, order.clone());
            if !self.assign_orders(state, classes, root, per_class, depth + 1, chosen)? {
                return Ok(false);
            }
        }
        chosen.remove(class);
        Ok(true)
    }

    /// Final checks on one fully ordered tree: yield order, precedence,
    /// dominance. Survivors become models.
    fn finish(
        &mut self,
        state: &State,
        classes: &[Vec<usize>],
        root: usize,
        orders: &BTreeMap<usize, Vec<usize>>,
    ) -> Result<bool, EngineError> {
        // In-order anchor yield plus per-class subtree token spans.
        let mut yield_seq: Vec<usize> = Vec::new();
        let mut spans: Vec<Option<(usize, usize)>> = vec![None; classes.len()];
        fn walk(
            class: usize,
            flat: &FlatSelection,
            classes: &[Vec<usize>],
            orders: &BTreeMap<usize, Vec<usize>>,
            yield_seq: &mut Vec<usize>,
            spans: &mut Vec<Option<(usize, usize)>>,
        ) {
            let mut span: Option<(usize, usize)> = None;
            if let Some(&anchor) = classes[class]
                .iter()
                .find(|&&n| flat.nodes[n].phon == Phon::Anchor)
            {
                let token = flat.nodes[anchor].token;
                yield_seq.push(token);
                span = Some((token, token));
            }
            if let Some(kids) = orders.get(&class) {
                for &kid in kids {
                    walk(kid, flat, classes, orders, yield_seq, spans);
                    if let Some((lo, hi)) = spans[kid] {
                        span = Some(match span {
                            None => (lo, hi),
                            Some((a, b)) => (a.min(lo), b.max(hi)),
                        });
                    }
                }
            }
            spans[class] = span;
        }
        walk(root, self.flat, classes, orders, &mut yield_seq, &mut spans);

        let expected: Vec<usize> = (0..self.flat.n_tokens()).collect();
        if yield_seq != expected {
            return Ok(true);
        }

        let class_of_node = |node: usize| {
            classes
                .iter()
                .position(|c| c.contains(&node))
                .expect("node in some class")
        };
        for &(l, r) in &self.flat.precedence {
            let (sl, sr) = (spans[class_of_node(l)], spans[class_of_node(r)]);
            if let (Some((_, hi)), Some((lo, _))) = (sl, sr) {
                if hi >= lo {
                    return Ok(true);
                }
            }
        }
        // parent chain per class for dominance checks
        let parents: Vec<Option<usize>> = {
            let mut parents = vec![None; classes.len()];
            for (&class, kids) in orders {
                for &kid in kids {
                    parents[kid] = Some(class);
                }
            }
            parents
        };
        for &(anc, desc) in &self.flat.dominance {
            let target = class_of_node(anc);
            let mut cur = class_of_node(desc);
            let mut ok = cur == target;
            while let Some(p) = parents[cur] {
                if p == target {
                    ok = true;
                    break;
                }
                cur = p;
            }
            if !ok {
                return Ok(true);
            }
        }

        let model = assemble_model(self.flat, classes, root, orders, &state.bindings, |c| {
            let slot = state.class_of[classes[c][0]];
            state.classes[slot].as_ref().unwrap().feats.clone()
        });
        if self.seen.insert(model.canonical()) {
            self.models.push(model);
            if self.models.len() >= self.limits.max_models {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All orderings of `items` compatible with the `before < after` pairs,
/// preserving the incoming order among unconstrained peers.
fn linear_extensions(items: &[usize], pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut remaining: Vec<usize> = items.to_vec();
    let mut prefix = Vec::with_capacity(items.len());
    fn rec(
        remaining: &mut Vec<usize>,
        pairs: &[(usize, usize)],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let item = remaining[i];
            let blocked = pairs
                .iter()
                .any(|&(before, after)| after == item && remaining.contains(&before));
            if blocked {
                continue;
            }
            remaining.remove(i);
            prefix.push(item);
            rec(remaining, pairs, prefix, out);
            prefix.pop();
            remaining.insert(i, item);
        }
    }
    rec(&mut remaining, pairs, &mut prefix, &mut out);
    out
}
