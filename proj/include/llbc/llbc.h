/* Part of the llbc project, under the Apache License v2.0.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the llbc toolkit: parsing, validation, borrow checking,
 * concrete execution, translation to pure code and differential testing.
 *
 * Every function returns an llbc_status. On failure the message of the
 * calling thread's last error is available through llbc_last_error().
 * Strings handed out by the library are released with llbc_string_free().
 */

#ifndef LLBC_LLBC_H
#define LLBC_LLBC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LLBC_API __declspec(dllexport)
#else
#define LLBC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct llbc_program llbc_program;

typedef enum llbc_status {
  LLBC_OK = 0,
  LLBC_ERR_ARGUMENT = 1, /* null pointer, unknown style, ... */
  LLBC_ERR_PARSE = 2,    /* syntax error in text or JSON input */
  LLBC_ERR_INVALID = 3,  /* static validation failed */
  LLBC_ERR_EVAL = 4,     /* evaluation error (code in llbc_last_error_code) */
  LLBC_ERR_TRANSLATE = 5,
  LLBC_ERR_INTERNAL = 6
} llbc_status;

typedef enum llbc_outcome {
  LLBC_RETURNED = 0,
  LLBC_PANICKED = 1,
  LLBC_EQUAL = 2,
  LLBC_DIFFER = 3,
  LLBC_INCONCLUSIVE = 4
} llbc_outcome;

typedef enum llbc_style { LLBC_STYLE_FSTAR = 0, LLBC_STYLE_NEUTRAL = 1 } llbc_style;

typedef struct llbc_options {
  int check_invariants; /* nonzero: check environment invariants after each step */
  int trace;            /* nonzero: record one environment dump per statement */
  int inline_lets;      /* nonzero: inline trivial lets in translations */
  uint64_t fuel;        /* call budget of the pure evaluator */
  uint64_t max_steps;   /* statement budget of the concrete interpreter */
} llbc_options;

LLBC_API void llbc_options_init(llbc_options* opts);

LLBC_API const char* llbc_version(void);
/* Message and code of the last failure on the calling thread ("" if none). */
LLBC_API const char* llbc_last_error(void);
LLBC_API const char* llbc_last_error_code(void);
LLBC_API void llbc_string_free(char* s);

/* Parses the textual syntax (len bytes of text) and validates the program.
 * On LLBC_ERR_INVALID, *out is still set and llbc_validate reports why. */
LLBC_API llbc_status llbc_program_parse(const char* text, size_t len, llbc_program** out);
LLBC_API llbc_status llbc_program_from_json(const char* text, size_t len, llbc_program** out);
LLBC_API void llbc_program_free(llbc_program* p);
LLBC_API llbc_status llbc_program_to_json(const llbc_program* p, char** json);
LLBC_API llbc_status llbc_program_pretty(const llbc_program* p, char** text);

/* Names of the closed entry points (nullary, non-generic functions with a
 * body) as a JSON array, in declaration order. */
LLBC_API llbc_status llbc_program_entries(const llbc_program* p, char** names_json);

/* Validation diagnostics as a JSON array of {code, message, line, col, fn}. */
LLBC_API llbc_status llbc_validate(const llbc_program* p, char** diagnostics_json);

/* Borrow checks every function. *all_ok is set to 1 iff every function is
 * accepted; report_json lists {fn, ok, code, message, line, col, env}. */
LLBC_API llbc_status llbc_check(const llbc_program* p, const llbc_options* opts, int* all_ok, char** report_json);

/* Runs a nullary entry. Evaluation errors give LLBC_ERR_EVAL. result_json
 * holds {outcome, value, trace, env}. */
LLBC_API llbc_status llbc_run(const llbc_program* p, const char* entry, const llbc_options* opts,
                              llbc_outcome* outcome, char** result_json);

/* Translates the whole program and prints it in the requested style.
 * report_json (optional) is {functions, types, decls, forward, backward,
 * opaque}; functions lists per-function results like llbc_check. */
LLBC_API llbc_status llbc_translate(const llbc_program* p, const llbc_options* opts, llbc_style style,
                                    char** text, char** report_json);

/* Compares the concrete run of entry with the pure evaluation of its
 * translation. *outcome is LLBC_EQUAL, LLBC_DIFFER or LLBC_INCONCLUSIVE;
 * result_json holds {verdict, concrete, pure}. */
LLBC_API llbc_status llbc_difftest(const llbc_program* p, const char* entry, const llbc_options* opts,
                                   llbc_outcome* outcome, char** result_json);

#ifdef __cplusplus
}
#endif

#endif
