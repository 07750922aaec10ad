//! Randomized cross-check of the backtracking engine against the
//! exhaustive oracle on small generated grammars. Deterministic: a fixed
//! linear-congruential generator drives everything.

use std::collections::BTreeSet;

use igdep::engine::{oracle_parse, parse_all, verify_model, EngineError, SearchLimits};
use igdep::grammar::GrammarLexicon;
use igdep::ParseModel;

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }
}

/// Builds one random word entry as grammar-file JSON. Shapes are small:
/// 1..=4 nodes, a random forest over them, exactly one anchor, empties only
/// at leaves.
fn random_entry(rng: &mut Lcg, word_index: usize, entry_index: usize) -> String {
    let cats = ["A", "B"];
    let pols = ["+", "-", "~d", "~c", "=", "="];
    let n_nodes = 1 + rng.below(4);
    let ids: Vec<String> = (0..n_nodes)
        .map(|i| format!("w{word_index}e{entry_index}n{i}"))
        .collect();

    // Random forest: each node after the first may attach under any earlier
    // node.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for i in 1..n_nodes {
        if rng.chance(75) {
            let parent = rng.below(i);
            children[parent].push(i);
        }
    }
    let leaf = |i: usize, children: &[Vec<usize>]| children[i].is_empty();

    // Exactly one anchor, on a leaf so the entry stays realistic.
    let leaves: Vec<usize> = (0..n_nodes).filter(|&i| leaf(i, &children)).collect();
    let anchor = leaves[rng.below(leaves.len())];

    let mut nodes = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let cat = cats[rng.below(cats.len())];
        let pol = pols[rng.below(pols.len())];
        let phon = if i == anchor {
            "anchor"
        } else if leaf(i, &children) && rng.chance(15) {
            "empty"
        } else {
            "internal"
        };
        let feats = if rng.chance(25) {
            let value = ["x", "y", "?V"][rng.below(3)];
            format!(", \"feats\": {{\"f\": \"{value}\"}}")
        } else {
            String::new()
        };
        nodes.push(format!(
            "{{\"id\": \"{id}\", \"cat\": \"{cat}\", \"pol\": \"{pol}\", \"phon\": \"{phon}\"{feats}}}"
        ));
    }

    let child_lists: Vec<String> = (0..n_nodes)
        .filter(|&i| !children[i].is_empty())
        .map(|i| {
            let kids: Vec<String> = children[i]
                .iter()
                .map(|&c| format!("\"{}\"", ids[c]))
                .collect();
            format!("[\"{}\", [{}]]", ids[i], kids.join(", "))
        })
        .collect();

    // Occasionally add a dominance edge from a root-side node to a later
    // one (never creating a cycle: always earlier -> later).
    let mut dominance = Vec::new();
    if n_nodes >= 2 && rng.chance(20) {
        let a = rng.below(n_nodes - 1);
        let d = a + 1 + rng.below(n_nodes - a - 1);
        dominance.push(format!("[\"{}\", \"{}\"]", ids[a], ids[d]));
    }

    format!(
        "{{\"nodes\": [{}], \"children\": [{}], \"dominance\": [{}]}}",
        nodes.join(", "),
        child_lists.join(", "),
        dominance.join(", ")
    )
}

fn random_grammar(rng: &mut Lcg, n_words: usize) -> Option<GrammarLexicon> {
    let mut words = Vec::new();
    for w in 0..n_words {
        let n_entries = 1 + usize::from(rng.chance(30));
        let entries: Vec<String> = (0..n_entries).map(|e| random_entry(rng, w, e)).collect();
        words.push(format!("\"word{w}\": [{}]", entries.join(", ")));
    }
    let source = format!(
        "{{\"name\": \"random\", \"words\": {{{}}}}}",
        words.join(", ")
    );
    GrammarLexicon::from_str(&source).ok()
}

fn canonical_set(models: &[ParseModel]) -> BTreeSet<String> {
    models.iter().map(ParseModel::canonical).collect()
}

#[test]
fn engine_matches_oracle_on_random_grammars() {
    let mut rng = Lcg(0x1d9d_2026);
    let limits = SearchLimits {
        max_models: 64,
        ..SearchLimits::default()
    };
    let mut compared = 0;
    let mut with_models = 0;
    for _ in 0..1500 {
        let n_words = 1 + rng.below(3);
        let grammar = match random_grammar(&mut rng, n_words) {
            Some(grammar) => grammar,
            None => continue,
        };
        let n_tokens = 1 + rng.below(3);
        let tokens: Vec<String> = (0..n_tokens)
            .map(|_| format!("word{}", rng.below(n_words)))
            .collect();

        let oracle = match oracle_parse(&grammar, &tokens) {
            Ok(models) => models,
            Err(EngineError::OracleCapExceeded { .. }) => continue,
            Err(other) => panic!("oracle failed on {tokens:?}: {other}"),
        };
        let engine = parse_all(&grammar, &tokens, limits)
            .unwrap_or_else(|e| panic!("engine failed on {tokens:?}: {e}"));

        // Only compare full sets when the engine was not truncated.
        if engine.models.len() < limits.max_models {
            assert_eq!(
                canonical_set(&engine.models),
                canonical_set(&oracle),
                "mismatch on {tokens:?} over grammar {}",
                grammar.to_json_string()
            );
        }
        for model in engine.models.iter().chain(oracle.iter()) {
            verify_model(&grammar, &tokens, model).unwrap_or_else(|e| {
                panic!(
                    "invalid model on {tokens:?}: {e:?}\ngrammar {}",
                    grammar.to_json_string()
                )
            });
        }
        compared += 1;
        if !oracle.is_empty() {
            with_models += 1;
        }
    }
    // The generator must actually exercise the comparison, including cases
    // that do parse.
    assert!(compared >= 750, "only {compared} cases compared");
    assert!(with_models >= 25, "only {with_models} cases had models");
}
