//! The polarity algebra that drives node superposition.
//!
//! Nodes carry one of five polarities. Composition follows a fixed table:
//! virtual polarities are neutral, a positive and a negative compose to the
//! saturated polarity, and every other combination is an illegal fusion.
//! The dependency/context split of the virtual polarity does not change the
//! algebra; it only tells the dependency extractor which virtual nodes stand
//! for dependencies.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Interaction valence of a description node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    /// A resource on offer, written `+`.
    Positive,
    /// A resource that is required, written `-`.
    Negative,
    /// Virtual polarity encoding a dependency of the word, written `~d`.
    VirtualDep,
    /// Virtual polarity constraining the syntactic context only, written `~c`.
    VirtualCtx,
    /// A fulfilled polarity, written `=`.
    Saturated,
}

/// All five polarity kinds, handy for exhaustive checks.
pub const ALL_POLARITIES: [Polarity; 5] = [
    Polarity::Positive,
    Polarity::Negative,
    Polarity::VirtualDep,
    Polarity::VirtualCtx,
    Polarity::Saturated,
];

impl Polarity {
    pub fn is_virtual(self) -> bool {
        matches!(self, Polarity::VirtualDep | Polarity::VirtualCtx)
    }

    /// Token used in grammar files.
    pub fn token(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
            Polarity::VirtualDep => "~d",
            Polarity::VirtualCtx => "~c",
            Polarity::Saturated => "=",
        }
    }

    /// Inverse of [`Polarity::token`]. Returns `None` for anything outside
    /// the five grammar-file tokens.
    pub fn from_token(token: &str) -> Option<Polarity> {
        match token {
            "+" => Some(Polarity::Positive),
            "-" => Some(Polarity::Negative),
            "~d" => Some(Polarity::VirtualDep),
            "~c" => Some(Polarity::VirtualCtx),
            "=" => Some(Polarity::Saturated),
            _ => None,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Composes two polarities. `None` means the fusion is illegal; the search
/// treats it as a pruning signal, not an error.
///
/// Virtual polarities are the neutral element. When two virtual polarities
/// meet, the result stays virtual; it is reported as `VirtualDep` when either
/// side is `VirtualDep` so that a merged set remembers it still carries a
/// dependency requirement. The two virtual kinds are otherwise
/// interchangeable.
pub fn compose(a: Polarity, b: Polarity) -> Option<Polarity> {
    use Polarity::*;
    match (a, b) {
        (VirtualDep, VirtualDep) | (VirtualDep, VirtualCtx) | (VirtualCtx, VirtualDep) => {
            Some(VirtualDep)
        }
        (VirtualCtx, VirtualCtx) => Some(VirtualCtx),
        (v, x) if v.is_virtual() => Some(x),
        (x, v) if v.is_virtual() => Some(x),
        (Positive, Negative) | (Negative, Positive) => Some(Saturated),
        _ => None,
    }
}

/// Folds [`compose`] over a non-empty multiset. Composition is associative
/// and commutative, so the fold order does not matter; `None` is returned if
/// any fusion fails (or if the multiset is empty).
pub fn compose_multiset<I>(polarities: I) -> Option<Polarity>
where
    I: IntoIterator<Item = Polarity>,
{
    let mut iter = polarities.into_iter();
    let first = iter.next()?;
    iter.try_fold(first, compose)
}

/// True iff the polarity multiset is `{=}` plus any number of virtuals, or
/// `{+, -}` plus any number of virtuals. These are exactly the sets of
/// polarities that may legally end up fused on a single tree node.
pub fn is_saturation_valid<I>(polarities: I) -> bool
where
    I: IntoIterator<Item = Polarity>,
{
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut sat = 0usize;
    let mut seen_any = false;
    for p in polarities {
        seen_any = true;
        match p {
            Polarity::Positive => pos += 1,
            Polarity::Negative => neg += 1,
            Polarity::Saturated => sat += 1,
            _ => {}
        }
    }
    seen_any && ((sat == 1 && pos == 0 && neg == 0) || (sat == 0 && pos == 1 && neg == 1))
}

/// A multiset of polarized description nodes considered for fusion into one
/// tree node. `I` identifies the nodes; the algebra only looks at the
/// polarities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeSet<I> {
    pub members: Vec<(I, Polarity)>,
}

impl<I> MergeSet<I> {
    pub fn new(members: Vec<(I, Polarity)>) -> Self {
        MergeSet { members }
    }

    pub fn polarities(&self) -> impl Iterator<Item = Polarity> + '_ {
        self.members.iter().map(|(_, p)| *p)
    }

    pub fn compose(&self) -> Option<Polarity> {
        compose_multiset(self.polarities())
    }

    pub fn is_saturation_valid(&self) -> bool {
        is_saturation_valid(self.polarities())
    }
}

#[cfg(test)]
mod tests {
    use super::Polarity::*;
    use super::*;

    /// The composition table, row by row, in the order `~ - + =` with the
    /// virtual row/column expanded into its two kinds. `None` marks the
    /// blank (failing) cells.
    #[test]
    fn composition_table_is_exact() {
        let cases: &[(Polarity, Polarity, Option<Polarity>)] = &[
            (VirtualDep, VirtualDep, Some(VirtualDep)),
            (VirtualDep, VirtualCtx, Some(VirtualDep)),
            (VirtualCtx, VirtualDep, Some(VirtualDep)),
            (VirtualCtx, VirtualCtx, Some(VirtualCtx)),
            (VirtualDep, Negative, Some(Negative)),
            (VirtualDep, Positive, Some(Positive)),
            (VirtualDep, Saturated, Some(Saturated)),
            (VirtualCtx, Negative, Some(Negative)),
            (VirtualCtx, Positive, Some(Positive)),
            (VirtualCtx, Saturated, Some(Saturated)),
            (Negative, VirtualDep, Some(Negative)),
            (Negative, VirtualCtx, Some(Negative)),
            (Negative, Negative, None),
            (Negative, Positive, Some(Saturated)),
            (Negative, Saturated, None),
            (Positive, VirtualDep, Some(Positive)),
            (Positive, VirtualCtx, Some(Positive)),
            (Positive, Negative, Some(Saturated)),
            (Positive, Positive, None),
            (Positive, Saturated, None),
            (Saturated, VirtualDep, Some(Saturated)),
            (Saturated, VirtualCtx, Some(Saturated)),
            (Saturated, Negative, None),
            (Saturated, Positive, None),
            (Saturated, Saturated, None),
        ];
        assert_eq!(cases.len(), 25);
        for &(a, b, expected) in cases {
            assert_eq!(compose(a, b), expected, "compose({a}, {b})");
        }
    }

    #[test]
    fn composition_is_commutative() {
        for &a in &ALL_POLARITIES {
            for &b in &ALL_POLARITIES {
                assert_eq!(compose(a, b), compose(b, a), "compose({a}, {b})");
            }
        }
    }

    /// Every multiset of size <= max_len over the five polarities.
    fn multisets(max_len: usize) -> Vec<Vec<Polarity>> {
        let mut out = Vec::new();
        fn rec(out: &mut Vec<Vec<Polarity>>, cur: &mut Vec<Polarity>, from: usize, left: usize) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if left == 0 {
                return;
            }
            for (i, &p) in ALL_POLARITIES.iter().enumerate().skip(from) {
                cur.push(p);
                rec(out, cur, i, left - 1);
                cur.pop();
            }
        }
        rec(&mut out, &mut Vec::new(), 0, max_len);
        out
    }

    fn permutations(items: &[Polarity]) -> Vec<Vec<Polarity>> {
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

    /// All results obtainable by composing `items` under any bracketing.
    /// `None` is a possible outcome like any other.
    fn bracketing_results(items: &[Polarity]) -> Vec<Option<Polarity>> {
        if items.len() == 1 {
            return vec![Some(items[0])];
        }
        let mut out = Vec::new();
        for split in 1..items.len() {
            for l in bracketing_results(&items[..split]) {
                for r in bracketing_results(&items[split..]) {
                    match (l, r) {
                        (Some(l), Some(r)) => out.push(compose(l, r)),
                        _ => out.push(None),
                    }
                }
            }
        }
        out
    }

    /// Exhaustive check that iterated composition is well defined: for every
    /// multiset of size <= 4, every permutation and every bracketing yields
    /// the same result (or all of them fail).
    #[test]
    fn composition_is_order_independent() {
        for ms in multisets(4) {
            let mut outcomes: Vec<Option<Polarity>> = Vec::new();
            for perm in permutations(&ms) {
                outcomes.extend(bracketing_results(&perm));
            }
            let first = outcomes[0];
            assert!(
                outcomes.iter().all(|o| *o == first),
                "fold order changed the outcome for {ms:?}: {outcomes:?}"
            );
            assert_eq!(compose_multiset(ms.iter().copied()), first, "{ms:?}");
        }
    }

    /// `is_saturation_valid` agrees with the algebraic characterisation:
    /// composition reaches `=` and no polarity among `+`, `-`, `=` occurs
    /// twice. Exhaustive over multisets of size <= 5.
    #[test]
    fn saturation_validity_matches_algebra() {
        for ms in multisets(5) {
            let count = |p: Polarity| ms.iter().filter(|&&q| q == p).count();
            let algebraic = compose_multiset(ms.iter().copied()) == Some(Saturated)
                && count(Positive) <= 1
                && count(Negative) <= 1
                && count(Saturated) <= 1;
            assert_eq!(
                is_saturation_valid(ms.iter().copied()),
                algebraic,
                "multiset {ms:?}"
            );
        }
    }

    #[test]
    fn multiset_composition_examples() {
        assert_eq!(
            compose_multiset([Positive, Negative, VirtualDep, VirtualCtx]),
            Some(Saturated)
        );
        assert_eq!(compose_multiset([Saturated, VirtualDep]), Some(Saturated));
        assert_eq!(compose_multiset([Positive, Saturated]), None);
        assert_eq!(compose_multiset([]), None);
    }

    #[test]
    fn saturation_validity_examples() {
        assert!(is_saturation_valid([Saturated, VirtualDep, VirtualCtx]));
        assert!(is_saturation_valid([Positive, Negative]));
        assert!(is_saturation_valid([Saturated]));
        assert!(!is_saturation_valid([VirtualDep]));
        assert!(!is_saturation_valid([Positive, Negative, Positive]));
        assert!(!is_saturation_valid([Positive, Negative, Saturated]));
        assert!(!is_saturation_valid([]));
    }

    /// Swapping the two virtual kinds never changes definedness, and never
    /// changes the result beyond the virtual kind itself.
    #[test]
    fn virtual_kinds_are_interchangeable() {
        fn swap(p: Polarity) -> Polarity {
            match p {
                VirtualDep => VirtualCtx,
                VirtualCtx => VirtualDep,
                other => other,
            }
        }
        fn collapse(p: Polarity) -> Polarity {
            if p.is_virtual() {
                VirtualDep
            } else {
                p
            }
        }
        for &a in &ALL_POLARITIES {
            for &b in &ALL_POLARITIES {
                let plain = compose(a, b);
                let swapped = compose(swap(a), swap(b));
                assert_eq!(plain.map(collapse), swapped.map(collapse), "({a}, {b})");
            }
        }
        for ms in multisets(4) {
            let swapped: Vec<Polarity> = ms.iter().map(|&p| swap(p)).collect();
            assert_eq!(
                is_saturation_valid(ms.iter().copied()),
                is_saturation_valid(swapped.iter().copied()),
                "{ms:?}"
            );
            assert_eq!(
                compose_multiset(ms.iter().copied()).map(collapse),
                compose_multiset(swapped.iter().copied()).map(collapse),
                "{ms:?}"
            );
        }
    }

    #[test]
    fn tokens_round_trip() {
        for &p in &ALL_POLARITIES {
            assert_eq!(Polarity::from_token(p.token()), Some(p));
        }
        assert_eq!(Polarity::from_token("±"), None);
        assert_eq!(Polarity::from_token("~"), None);
    }

    #[test]
    fn merge_set_wraps_the_algebra() {
        let set = MergeSet::new(vec![("g4", Positive), ("g5", Negative)]);
        assert_eq!(set.compose(), Some(Saturated));
        assert!(set.is_saturation_valid());
        let lone = MergeSet::new(vec![("h2", VirtualDep)]);
        assert_eq!(lone.compose(), Some(VirtualDep));
        assert!(!lone.is_saturation_valid());
    }
}
