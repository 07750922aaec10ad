//! C ABI for the igdep parsing library.
//!
//! Handles are opaque pointers owned by the library; every `*_free` function
//! accepts null. Functions that produce data report an [`IgStatus`] and
//! write their result through an out-pointer; string results are owned by
//! the caller and released with [`ig_string_free`]. On any non-`Ok` status a
//! message is kept per thread and can be fetched with
//! [`ig_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use igdep::deps::{extract, relabel_with_functions, DependencyGraph};
use igdep::engine::{parse_all, EngineError, SearchLimits};
use igdep::grammar::{tokenize, GrammarError, GrammarLexicon};
use igdep::metrics::MetricsReport;
use igdep::ParseModel;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The grammar document could not be loaded.
    GrammarError = 3,
    /// A sentence token is missing from the lexicon.
    UnknownWord = 4,
    /// The search exhausted its merge or time budget.
    LimitExceeded = 5,
    /// A model index was out of range.
    IndexOutOfRange = 6,
    /// Unexpected internal failure.
    Internal = 7,
}

/// Search budgets; see `ig_limits_default` for the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IgLimits {
    pub max_merges: usize,
    pub max_models: usize,
    pub timeout_ms: u64,
}

/// Opaque loaded grammar.
pub struct IgGrammar {
    lexicon: GrammarLexicon,
}

/// Opaque parse result: the models of one sentence.
pub struct IgParse {
    models: Vec<ParseModel>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let message = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message describing the calling thread's most recent failure, or null.
/// The caller owns the string and frees it with `ig_string_free`.
#[no_mangle]
pub extern "C" fn ig_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        None => std::ptr::null_mut(),
        Some(message) => message.clone().into_raw(),
    })
}

/// Frees a string returned by this library. Null is accepted.
///
/// # Safety
/// `string` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ig_string_free(string: *mut c_char) {
    if !string.is_null() {
        drop(CString::from_raw(string));
    }
}

/// Default search budgets (10000 merges, 16 models, 5000 ms).
#[no_mangle]
pub extern "C" fn ig_limits_default() -> IgLimits {
    let limits = SearchLimits::default();
    IgLimits {
        max_merges: limits.max_merges,
        max_models: limits.max_models,
        timeout_ms: limits.timeout_ms,
    }
}

fn guarded(body: impl FnOnce() -> IgStatus) -> IgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            IgStatus::Internal
        }
    }
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, IgStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(IgStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        IgStatus::InvalidUtf8
    })
}

/// Loads a grammar from a JSON document. On success writes a handle to
/// `out`; free it with `ig_grammar_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_grammar_from_json(
    json: *const c_char,
    out: *mut *mut IgGrammar,
) -> IgStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return IgStatus::NullPointer;
        }
        let source = match read_utf8(json) {
            Ok(source) => source,
            Err(status) => return status,
        };
        match GrammarLexicon::from_str(source) {
            Ok(lexicon) => {
                clear_error();
                *out = Box::into_raw(Box::new(IgGrammar { lexicon }));
                IgStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                IgStatus::GrammarError
            }
        }
    })
}

/// The bundled toy grammar. Never fails.
#[no_mangle]
pub extern "C" fn ig_grammar_builtin_toy() -> *mut IgGrammar {
    let lexicon = GrammarLexicon::from_str(igdep::assets::TOY_GRAMMAR)
        .expect("bundled grammar is well-formed");
    Box::into_raw(Box::new(IgGrammar { lexicon }))
}

/// The bundled fragment variant of the toy grammar. Never fails.
#[no_mangle]
pub extern "C" fn ig_grammar_builtin_fragments() -> *mut IgGrammar {
    let lexicon = GrammarLexicon::from_str(igdep::assets::TOY_FRAGMENTS_GRAMMAR)
        .expect("bundled grammar is well-formed");
    Box::into_raw(Box::new(IgGrammar { lexicon }))
}

/// Frees a grammar handle. Null is accepted.
///
/// # Safety
/// `grammar` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ig_grammar_free(grammar: *mut IgGrammar) {
    if !grammar.is_null() {
        drop(Box::from_raw(grammar));
    }
}

/// Number of word forms in the lexicon; 0 for a null handle.
///
/// # Safety
/// `grammar` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ig_grammar_word_count(grammar: *const IgGrammar) -> usize {
    match grammar.as_ref() {
        None => 0,
        Some(g) => g.lexicon.word_count(),
    }
}

/// Number of entries violating the connectivity condition; 0 means every
/// extracted dependency graph is connected.
///
/// # Safety
/// `grammar` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ig_grammar_connectivity_offenders(grammar: *const IgGrammar) -> usize {
    match grammar.as_ref() {
        None => 0,
        Some(g) => g.lexicon.check_connectivity_condition().len(),
    }
}

/// Parses a whitespace-tokenized sentence. `Ok` with zero models is the
/// no-parse outcome; inspect `ig_parse_model_count`. Free the handle with
/// `ig_parse_free`.
///
/// # Safety
/// All pointers must be valid; `sentence` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ig_parse(
    grammar: *const IgGrammar,
    sentence: *const c_char,
    limits: IgLimits,
    out: *mut *mut IgParse,
) -> IgStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return IgStatus::NullPointer;
        }
        let grammar = match grammar.as_ref() {
            Some(g) => g,
            None => {
                set_error("null grammar handle");
                return IgStatus::NullPointer;
            }
        };
        let sentence = match read_utf8(sentence) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let tokens = tokenize(sentence);
        let limits = SearchLimits {
            max_merges: limits.max_merges,
            max_models: limits.max_models,
            timeout_ms: limits.timeout_ms,
        };
        match parse_all(&grammar.lexicon, &tokens, limits) {
            Ok(outcome) => {
                clear_error();
                *out = Box::into_raw(Box::new(IgParse {
                    models: outcome.models,
                }));
                IgStatus::Ok
            }
            Err(e @ EngineError::Grammar(GrammarError::UnknownWord(_))) => {
                set_error(e.to_string());
                IgStatus::UnknownWord
            }
            Err(e @ EngineError::LimitExceeded { .. }) => {
                set_error(e.to_string());
                IgStatus::LimitExceeded
            }
            Err(e) => {
                set_error(e.to_string());
                IgStatus::GrammarError
            }
        }
    })
}

/// Frees a parse handle. Null is accepted.
///
/// # Safety
/// `parse` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_free(parse: *mut IgParse) {
    if !parse.is_null() {
        drop(Box::from_raw(parse));
    }
}

/// Number of models found; 0 for no parse (or a null handle).
///
/// # Safety
/// `parse` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_model_count(parse: *const IgParse) -> usize {
    match parse.as_ref() {
        None => 0,
        Some(p) => p.models.len(),
    }
}

unsafe fn with_model(
    parse: *const IgParse,
    model: usize,
    out: *mut *mut c_char,
    render: impl FnOnce(&ParseModel) -> String,
) -> IgStatus {
    if out.is_null() {
        set_error("null out pointer");
        return IgStatus::NullPointer;
    }
    let parse = match parse.as_ref() {
        Some(p) => p,
        None => {
            set_error("null parse handle");
            return IgStatus::NullPointer;
        }
    };
    let model = match parse.models.get(model) {
        Some(m) => m,
        None => {
            set_error(format!(
                "model index {model} out of range for {} model(s)",
                parse.models.len()
            ));
            return IgStatus::IndexOutOfRange;
        }
    };
    match CString::new(render(model)) {
        Ok(text) => {
            clear_error();
            *out = text.into_raw();
            IgStatus::Ok
        }
        Err(_) => {
            set_error("rendered text contains an interior NUL byte");
            IgStatus::Internal
        }
    }
}

fn graph_of(model: &ParseModel, label_funct: bool) -> DependencyGraph {
    let graph = extract(model);
    if label_funct {
        relabel_with_functions(&graph, model)
    } else {
        graph
    }
}

/// Bracketed constituency tree of one model.
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_tree_bracketed(
    parse: *const IgParse,
    model: usize,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| with_model(parse, model, out, |m| m.bracketed()))
}

/// Tree plus merge map of one model, as a JSON document.
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_model_json(
    parse: *const IgParse,
    model: usize,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| with_model(parse, model, out, |m| m.to_json().to_string()))
}

/// Dependency graph of one model as a JSON document. With `label_funct`,
/// edges take the `funct` feature of their saturation site as label.
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_dependencies_json(
    parse: *const IgParse,
    model: usize,
    label_funct: bool,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| {
        with_model(parse, model, out, |m| {
            graph_of(m, label_funct).to_json_string()
        })
    })
}

/// Dependency graph of one model in the TSV wire format (1-based indices,
/// `governor:label:kind` cells).
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_dependencies_tsv(
    parse: *const IgParse,
    model: usize,
    label_funct: bool,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| with_model(parse, model, out, |m| graph_of(m, label_funct).to_tsv()))
}

/// Dependency graph of one model as Graphviz DOT (linear edges solid,
/// non-linear dashed).
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_dependencies_dot(
    parse: *const IgParse,
    model: usize,
    label_funct: bool,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| with_model(parse, model, out, |m| graph_of(m, label_funct).to_dot()))
}

/// Structural metrics of one model's dependency graph as a flat JSON
/// record: connected, projective, block_degree, well_nested, worst_word,
/// worst_blocks.
///
/// # Safety
/// `parse` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_parse_metrics_json(
    parse: *const IgParse,
    model: usize,
    out: *mut *mut c_char,
) -> IgStatus {
    guarded(|| {
        with_model(parse, model, out, |m| {
            MetricsReport::of(&extract(m)).to_json_string()
        })
    })
}
