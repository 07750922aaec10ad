//! Compiles and runs a small C client against the generated header and the
//! static library, proving the ABI from the other side.

use std::path::PathBuf;
use std::process::Command;

const C_CLIENT: &str = r#"
#include <stdio.h>
#include <string.h>
#include "igdep.h"

int main(void) {
    IgGrammar *grammar = ig_grammar_builtin_toy();
    if (ig_grammar_word_count(grammar) != 11) return 10;
    if (ig_grammar_connectivity_offenders(grammar) != 0) return 11;

    IgParse *parse = NULL;
    IgStatus status = ig_parse(grammar, "jean en conna\xc3\xaet la couleur",
                               ig_limits_default(), &parse);
    if (status != IgStatus_Ok) return 12;
    if (ig_parse_model_count(parse) != 1) return 13;

    char *tsv = NULL;
    if (ig_parse_dependencies_tsv(parse, 0, false, &tsv) != IgStatus_Ok) return 14;
    if (strstr(tsv, "5\tcouleur\t3:NP:linear") == NULL) return 15;
    ig_string_free(tsv);

    char *metrics = NULL;
    if (ig_parse_metrics_json(parse, 0, &metrics) != IgStatus_Ok) return 16;
    if (strstr(metrics, "\"block_degree\":2") == NULL) return 17;
    ig_string_free(metrics);

    ig_parse_free(parse);

    status = ig_parse(grammar, "xyzzy", ig_limits_default(), &parse);
    if (status != IgStatus_UnknownWord) return 18;
    char *message = ig_last_error_message();
    if (message == NULL || strstr(message, "xyzzy") == NULL) return 19;
    ig_string_free(message);

    ig_grammar_free(grammar);
    puts("c client ok");
    return 0;
}
"#;

fn find_staticlib() -> PathBuf {
    // The test binary lives in target/<profile>/deps. Depending on how the
    // build was invoked, the staticlib sits either next to it or one level
    // up.
    let mut profile = std::env::current_exe().unwrap();
    profile.pop();
    if profile.ends_with("deps") {
        profile.pop();
    }
    let candidates = [
        profile.join("libigdep_capi.a"),
        profile.join("deps").join("libigdep_capi.a"),
    ];
    for candidate in &candidates {
        if candidate.exists() {
            return candidate.clone();
        }
    }
    panic!("staticlib not found in {}", profile.display());
}

#[test]
fn c_client_builds_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    let staticlib = find_staticlib();

    let scratch = std::env::temp_dir().join(format!("igdep-capi-c-{}", std::process::id()));
    std::fs::create_dir_all(&scratch).unwrap();
    let source = scratch.join("client.c");
    let binary = scratch.join("client");
    std::fs::write(&source, C_CLIENT).unwrap();

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&include_dir)
        .arg(&staticlib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("client runs");
    assert!(
        run.status.success(),
        "client exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "c client ok");
}
