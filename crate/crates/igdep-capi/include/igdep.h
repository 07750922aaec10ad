#ifndef IGDEP_CAPI_H
#define IGDEP_CAPI_H

/* Generated by cbindgen from the igdep-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum IgStatus {
  IgStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  IgStatus_NullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  IgStatus_InvalidUtf8 = 2,
  /**
   * The grammar document could not be loaded.
   */
  IgStatus_GrammarError = 3,
  /**
   * A sentence token is missing from the lexicon.
   */
  IgStatus_UnknownWord = 4,
  /**
   * The search exhausted its merge or time budget.
   */
  IgStatus_LimitExceeded = 5,
  /**
   * A model index was out of range.
   */
  IgStatus_IndexOutOfRange = 6,
  /**
   * Unexpected internal failure.
   */
  IgStatus_Internal = 7,
} IgStatus;

/**
 * Opaque loaded grammar.
 */
typedef struct IgGrammar IgGrammar;

/**
 * Opaque parse result: the models of one sentence.
 */
typedef struct IgParse IgParse;

/**
 * Search budgets; see `ig_limits_default` for the defaults.
 */
typedef struct IgLimits {
  size_t max_merges;
  size_t max_models;
  uint64_t timeout_ms;
} IgLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the calling thread's most recent failure, or null.
 * The caller owns the string and frees it with `ig_string_free`.
 */
char *ig_last_error_message(void);

/**
 * Frees a string returned by this library. Null is accepted.
 *
 * # Safety
 * `string` must come from this library and not be freed twice.
 */
void ig_string_free(char *string);

/**
 * Default search budgets (10000 merges, 16 models, 5000 ms).
 */
struct IgLimits ig_limits_default(void);

/**
 * Loads a grammar from a JSON document. On success writes a handle to
 * `out`; free it with `ig_grammar_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum IgStatus ig_grammar_from_json(const char *json, struct IgGrammar **out);

/**
 * The bundled toy grammar. Never fails.
 */
struct IgGrammar *ig_grammar_builtin_toy(void);

/**
 * The bundled fragment variant of the toy grammar. Never fails.
 */
struct IgGrammar *ig_grammar_builtin_fragments(void);

/**
 * Frees a grammar handle. Null is accepted.
 *
 * # Safety
 * `grammar` must come from this library and not be freed twice.
 */
void ig_grammar_free(struct IgGrammar *grammar);

/**
 * Number of word forms in the lexicon; 0 for a null handle.
 *
 * # Safety
 * `grammar` must be a live handle or null.
 */
size_t ig_grammar_word_count(const struct IgGrammar *grammar);

/**
 * Number of entries violating the connectivity condition; 0 means every
 * extracted dependency graph is connected.
 *
 * # Safety
 * `grammar` must be a live handle or null.
 */
size_t ig_grammar_connectivity_offenders(const struct IgGrammar *grammar);

/**
 * Parses a whitespace-tokenized sentence. `Ok` with zero models is the
 * no-parse outcome; inspect `ig_parse_model_count`. Free the handle with
 * `ig_parse_free`.
 *
 * # Safety
 * All pointers must be valid; `sentence` NUL-terminated.
 */
enum IgStatus ig_parse(const struct IgGrammar *grammar,
                       const char *sentence,
                       struct IgLimits limits,
                       struct IgParse **out);

/**
 * Frees a parse handle. Null is accepted.
 *
 * # Safety
 * `parse` must come from this library and not be freed twice.
 */
void ig_parse_free(struct IgParse *parse);

/**
 * Number of models found; 0 for no parse (or a null handle).
 *
 * # Safety
 * `parse` must be a live handle or null.
 */
size_t ig_parse_model_count(const struct IgParse *parse);

/**
 * Bracketed constituency tree of one model.
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_tree_bracketed(const struct IgParse *parse, size_t model, char **out);

/**
 * Tree plus merge map of one model, as a JSON document.
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_model_json(const struct IgParse *parse, size_t model, char **out);

/**
 * Dependency graph of one model as a JSON document. With `label_funct`,
 * edges take the `funct` feature of their saturation site as label.
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_dependencies_json(const struct IgParse *parse,
                                         size_t model,
                                         bool label_funct,
                                         char **out);

/**
 * Dependency graph of one model in the TSV wire format (1-based indices,
 * `governor:label:kind` cells).
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_dependencies_tsv(const struct IgParse *parse,
                                        size_t model,
                                        bool label_funct,
                                        char **out);

/**
 * Dependency graph of one model as Graphviz DOT (linear edges solid,
 * non-linear dashed).
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_dependencies_dot(const struct IgParse *parse,
                                        size_t model,
                                        bool label_funct,
                                        char **out);

/**
 * Structural metrics of one model's dependency graph as a flat JSON
 * record: connected, projective, block_degree, well_nested, worst_word,
 * worst_blocks.
 *
 * # Safety
 * `parse` must be a live handle; `out` a valid pointer.
 */
enum IgStatus ig_parse_metrics_json(const struct IgParse *parse, size_t model, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* IGDEP_CAPI_H */
