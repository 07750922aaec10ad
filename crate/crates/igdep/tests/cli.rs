//! Exit-code contract and output determinism of the `igdep` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn igdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igdep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("igdep-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn parse_success_exits_zero_with_tsv_rows() {
    let out = igdep(&["parse", "-s", "jean en connaît la couleur", "-f", "tsv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("5\tcouleur\t3:NP:linear"), "{text}");
    assert!(text.contains("2\ten\t5:NP:nonlinear"), "{text}");
    assert!(text.contains("\"block_degree\":2"), "{text}");
}

#[test]
fn parse_no_parse_exits_one() {
    let out = igdep(&["parse", "-s", "couleur la connaît en jean"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no parse"));
}

#[test]
fn parse_unknown_word_exits_two() {
    let out = igdep(&["parse", "-s", "xyzzy"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("xyzzy"));
}

#[test]
fn parse_budget_exceeded_exits_three() {
    let out = igdep(&["parse", "-s", "jean le connaît", "--max-merges", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn parse_missing_grammar_file_exits_two() {
    let out = igdep(&[
        "parse",
        "-s",
        "jean le connaît",
        "-g",
        "/nonexistent/g.json",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn parse_output_is_byte_identical_across_runs() {
    let args = ["parse", "-s", "la fille que jean aime vient", "-f", "json"];
    let first = igdep(&args);
    let second = igdep(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn parse_all_models_emits_every_model() {
    let dir = scratch_dir();
    let grammar = dir.join("ambiguous.json");
    fs::write(
        &grammar,
        r#"{
            "name": "ambiguous",
            "words": {"x": [
                {"nodes": [{"id": "A", "cat": "S", "pol": "=", "phon": "anchor"}]},
                {"nodes": [{"id": "B", "cat": "S", "pol": "=", "phon": "anchor"}]}
            ]}
        }"#,
    )
    .unwrap();
    let g = grammar.to_str().unwrap();
    let first_only = igdep(&["parse", "-g", g, "-s", "x"]);
    assert_eq!(code(&first_only), 0);
    assert!(stdout(&first_only).contains("# model 1/1"));
    let all = igdep(&["parse", "-g", g, "-s", "x", "--all-models"]);
    assert_eq!(code(&all), 0);
    assert!(stdout(&all).contains("# model 1/2"));
    assert!(stdout(&all).contains("# model 2/2"));
}

#[test]
fn check_bundled_grammar_exits_zero() {
    let out = igdep(&["check"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("connectivity condition holds"));
}

#[test]
fn check_flags_connectivity_violations_with_exit_one() {
    let dir = scratch_dir();
    let grammar = dir.join("ctx-only.json");
    fs::write(
        &grammar,
        r#"{
            "name": "ctx-only",
            "words": {"hm": [{"nodes": [{"id": "a", "cat": "X", "pol": "~c", "phon": "anchor"}]}]}
        }"#,
    )
    .unwrap();
    let out = igdep(&["check", "-g", grammar.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("connectivity: `hm` entry 0"));
}

#[test]
fn check_malformed_grammar_exits_two() {
    let dir = scratch_dir();
    let grammar = dir.join("broken.json");
    fs::write(&grammar, "{ not json").unwrap();
    let out = igdep(&["check", "-g", grammar.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let missing = igdep(&["check", "-g", "/nonexistent/g.json"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn corpus_bundled_passes_with_exit_zero() {
    let dir = scratch_dir();
    let corpus = dir.join("bundled.tsv");
    fs::write(&corpus, igdep::assets::CORPUS).unwrap();
    let out = igdep(&["corpus", "-c", corpus.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("passed 13/13"));
}

#[test]
fn corpus_failing_line_exits_one() {
    let dir = scratch_dir();
    let corpus = dir.join("failing.tsv");
    fs::write(&corpus, "ok\tjean connaît\n").unwrap();
    let out = igdep(&["corpus", "-c", corpus.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL line 1"));
}

#[test]
fn corpus_unknown_verdict_exits_two() {
    let dir = scratch_dir();
    let corpus = dir.join("bad-verdict.tsv");
    fs::write(&corpus, "fine\tjean le connaît\n").unwrap();
    let out = igdep(&["corpus", "-c", corpus.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
