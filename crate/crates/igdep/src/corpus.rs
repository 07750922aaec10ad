//! Accept/reject regression corpora.
//!
//! A corpus is a tab-separated text file, one record per line:
//!
//! ```text
//! ok<TAB>jean le connaît<TAB>3:1:NP:linear;3:2:NP:linear
//! bad<TAB>la la couleur
//! ```
//!
//! The verdict is `ok` or `bad`; the optional third column lists the
//! expected dependency edges of the first model as 1-based
//! `governor:dependent:label:kind` entries joined by `;`. Blank lines and
//! lines starting with `#` are skipped.

use rayon::prelude::*;
use thiserror::Error;

use crate::deps::{extract, DepKind, DependencyGraph};
use crate::engine::{parse_all, SearchLimits};
use crate::grammar::{tokenize, GrammarLexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "ok",
            Verdict::Reject => "bad",
        }
    }
}

/// An expected edge, with zero-based token indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpectedEdge {
    pub governor: usize,
    pub dependent: usize,
    pub label: String,
    pub kind: DepKind,
}

#[derive(Debug, Clone)]
pub struct CorpusLine {
    /// 1-based line number in the file.
    pub number: usize,
    pub expected: Verdict,
    pub sentence: String,
    pub expected_edges: Option<Vec<ExpectedEdge>>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus line {line}: {message}")]
    Malformed { line: usize, message: String },
}

pub fn parse_corpus(source: &str) -> Result<Vec<CorpusLine>, CorpusError> {
    let mut lines = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let number = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(CorpusError::Malformed {
                line: number,
                message: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let expected = match fields[0] {
            "ok" => Verdict::Accept,
            "bad" => Verdict::Reject,
            other => {
                return Err(CorpusError::Malformed {
                    line: number,
                    message: format!("unknown verdict token `{other}`"),
                })
            }
        };
        let sentence = fields[1].trim().to_string();
        if sentence.is_empty() {
            return Err(CorpusError::Malformed {
                line: number,
                message: "empty sentence".to_string(),
            });
        }
        let expected_edges = match fields.get(2) {
            None => None,
            Some(spec) => Some(parse_edges(spec, number)?),
        };
        lines.push(CorpusLine {
            number,
            expected,
            sentence,
            expected_edges,
        });
    }
    Ok(lines)
}

fn parse_edges(spec: &str, line: usize) -> Result<Vec<ExpectedEdge>, CorpusError> {
    let malformed = |message: String| CorpusError::Malformed { line, message };
    let mut edges = Vec::new();
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 4 {
            return Err(malformed(format!(
                "edge `{part}` is not governor:dependent:label:kind"
            )));
        }
        let governor: usize = fields[0]
            .parse()
            .map_err(|_| malformed(format!("bad governor index in `{part}`")))?;
        let dependent: usize = fields[1]
            .parse()
            .map_err(|_| malformed(format!("bad dependent index in `{part}`")))?;
        if governor == 0 || dependent == 0 {
            return Err(malformed(format!("edge `{part}` uses 1-based indices")));
        }
        let kind = match fields[3] {
            "linear" => DepKind::Linear,
            "nonlinear" => DepKind::NonLinear,
            other => return Err(malformed(format!("unknown edge kind `{other}`"))),
        };
        edges.push(ExpectedEdge {
            governor: governor - 1,
            dependent: dependent - 1,
            label: fields[2].to_string(),
            kind,
        });
    }
    Ok(edges)
}

#[derive(Debug, Clone)]
pub struct LineResult {
    pub number: usize,
    pub sentence: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub results: Vec<LineResult>,
    pub passed: usize,
    pub failed: usize,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn edge_key_set(graph: &DependencyGraph) -> Vec<ExpectedEdge> {
    let mut out: Vec<ExpectedEdge> = graph
        .edges
        .iter()
        .map(|e| ExpectedEdge {
            governor: e.governor,
            dependent: e.dependent,
            label: e.label.clone(),
            kind: e.kind,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn run_line(grammar: &GrammarLexicon, line: &CorpusLine, limits: SearchLimits) -> LineResult {
    let tokens = tokenize(&line.sentence);
    let (pass, detail) = match parse_all(grammar, &tokens, limits) {
        Err(e) => (false, format!("error: {e}")),
        Ok(outcome) if outcome.models.is_empty() => match line.expected {
            Verdict::Reject => (true, "no parse, as expected".to_string()),
            Verdict::Accept => (false, "expected ok but no parse".to_string()),
        },
        Ok(outcome) => match line.expected {
            Verdict::Reject => (
                false,
                format!("expected bad but got {} model(s)", outcome.models.len()),
            ),
            Verdict::Accept => {
                let n = outcome.models.len();
                match &line.expected_edges {
                    None => (true, format!("{n} model(s)")),
                    Some(expected) => {
                        let graph = extract(&outcome.models[0]);
                        let got = edge_key_set(&graph);
                        let mut want = expected.clone();
                        want.sort();
                        want.dedup();
                        if got == want {
                            (true, format!("{n} model(s), edges match"))
                        } else {
                            (false, format!("edge mismatch: got {got:?}, want {want:?}"))
                        }
                    }
                }
            }
        },
    };
    LineResult {
        number: line.number,
        sentence: format!("{} {}", line.expected.as_str(), line.sentence),
        pass,
        detail,
    }
}

/// Runs every line against the grammar, in parallel, and aggregates the
/// results in line order.
pub fn run_corpus(
    grammar: &GrammarLexicon,
    lines: &[CorpusLine],
    limits: SearchLimits,
) -> CorpusReport {
    let mut results: Vec<LineResult> = lines
        .par_iter()
        .map(|line| run_line(grammar, line, limits))
        .collect();
    results.sort_by_key(|r| r.number);
    let passed = results.iter().filter(|r| r.pass).count();
    let failed = results.len() - passed;
    CorpusReport {
        results,
        passed,
        failed,
    }
}
