//! Exercises the C ABI from Rust: handle lifecycle, status codes, error
//! messages, and the rendered exports.

use std::ffi::{CStr, CString};
use std::ptr;

use igdep_capi::*;

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    unsafe {
        let text = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        ig_string_free(ptr);
        text
    }
}

#[test]
fn parse_the_running_example_through_the_abi() {
    unsafe {
        let grammar = ig_grammar_builtin_toy();
        assert_eq!(ig_grammar_word_count(grammar), 11);
        assert_eq!(ig_grammar_connectivity_offenders(grammar), 0);

        let sentence = CString::new("jean en connaît la couleur").unwrap();
        let mut parse: *mut IgParse = ptr::null_mut();
        let status = ig_parse(grammar, sentence.as_ptr(), ig_limits_default(), &mut parse);
        assert_eq!(status, IgStatus::Ok);
        assert_eq!(ig_parse_model_count(parse), 1);

        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(ig_parse_tree_bracketed(parse, 0, &mut out), IgStatus::Ok);
        let tree = take_string(out);
        assert!(tree.starts_with("(S (NP jean)"), "{tree}");

        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ig_parse_dependencies_tsv(parse, 0, false, &mut out),
            IgStatus::Ok
        );
        let tsv = take_string(out);
        assert!(tsv.contains("5\tcouleur\t3:NP:linear"), "{tsv}");

        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ig_parse_dependencies_json(parse, 0, true, &mut out),
            IgStatus::Ok
        );
        let json = take_string(out);
        assert!(json.contains("\"label\":\"subj\""), "{json}");

        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(ig_parse_metrics_json(parse, 0, &mut out), IgStatus::Ok);
        let metrics = take_string(out);
        assert!(metrics.contains("\"block_degree\":2"), "{metrics}");

        ig_parse_free(parse);
        ig_grammar_free(grammar);
    }
}

#[test]
fn no_parse_is_ok_with_zero_models() {
    unsafe {
        let grammar = ig_grammar_builtin_toy();
        let sentence = CString::new("la la couleur").unwrap();
        let mut parse: *mut IgParse = ptr::null_mut();
        assert_eq!(
            ig_parse(grammar, sentence.as_ptr(), ig_limits_default(), &mut parse),
            IgStatus::Ok
        );
        assert_eq!(ig_parse_model_count(parse), 0);
        ig_parse_free(parse);
        ig_grammar_free(grammar);
    }
}

#[test]
fn unknown_word_sets_status_and_message() {
    unsafe {
        let grammar = ig_grammar_builtin_toy();
        let sentence = CString::new("xyzzy").unwrap();
        let mut parse: *mut IgParse = ptr::null_mut();
        assert_eq!(
            ig_parse(grammar, sentence.as_ptr(), ig_limits_default(), &mut parse),
            IgStatus::UnknownWord
        );
        let message = take_string(ig_last_error_message());
        assert!(message.contains("xyzzy"), "{message}");
        ig_grammar_free(grammar);
    }
}

#[test]
fn limit_exceeded_maps_to_its_status() {
    unsafe {
        let grammar = ig_grammar_builtin_toy();
        let sentence = CString::new("jean le connaît").unwrap();
        let mut limits = ig_limits_default();
        limits.max_merges = 1;
        let mut parse: *mut IgParse = ptr::null_mut();
        assert_eq!(
            ig_parse(grammar, sentence.as_ptr(), limits, &mut parse),
            IgStatus::LimitExceeded
        );
        ig_grammar_free(grammar);
    }
}

#[test]
fn bad_grammar_json_is_reported() {
    unsafe {
        let source = CString::new("{ not json").unwrap();
        let mut grammar: *mut IgGrammar = ptr::null_mut();
        assert_eq!(
            ig_grammar_from_json(source.as_ptr(), &mut grammar),
            IgStatus::GrammarError
        );
        assert!(grammar.is_null());
        let message = take_string(ig_last_error_message());
        assert!(message.contains("JSON"), "{message}");
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut parse: *mut IgParse = ptr::null_mut();
        let sentence = CString::new("jean").unwrap();
        assert_eq!(
            ig_parse(
                ptr::null(),
                sentence.as_ptr(),
                ig_limits_default(),
                &mut parse
            ),
            IgStatus::NullPointer
        );
        let grammar = ig_grammar_builtin_toy();
        assert_eq!(
            ig_parse(grammar, ptr::null(), ig_limits_default(), &mut parse),
            IgStatus::NullPointer
        );
        assert_eq!(ig_parse_model_count(ptr::null()), 0);
        ig_grammar_free(grammar);
        // Free functions tolerate null.
        ig_parse_free(ptr::null_mut());
        ig_grammar_free(ptr::null_mut());
        ig_string_free(ptr::null_mut());
    }
}

#[test]
fn model_index_out_of_range() {
    unsafe {
        let grammar = ig_grammar_builtin_fragments();
        let sentence = CString::new("la couleur").unwrap();
        let mut parse: *mut IgParse = ptr::null_mut();
        assert_eq!(
            ig_parse(grammar, sentence.as_ptr(), ig_limits_default(), &mut parse),
            IgStatus::Ok
        );
        assert_eq!(ig_parse_model_count(parse), 1);
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ig_parse_tree_bracketed(parse, 7, &mut out),
            IgStatus::IndexOutOfRange
        );
        ig_parse_free(parse);
        ig_grammar_free(grammar);
    }
}
