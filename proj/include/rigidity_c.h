#ifndef RIGIDITY_C_H
#define RIGIDITY_C_H

/* C interface to the rigidity analysis core. All functions return a
 * rig_status; output strings are heap-allocated JSON or CSV owned by the
 * caller and released with rig_string_free. A NULL required argument yields
 * RIG_ERR_INVALID_ARGUMENT. rig_last_error() describes the most recent
 * failure on the calling thread. */

#include <stddef.h>

#if defined(_WIN32)
#define RIG_API __declspec(dllexport)
#else
#define RIG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rig_status {
  RIG_OK = 0,
  RIG_ERR_INVALID_ARGUMENT = 1,
  RIG_ERR_PARSE = 2,
  RIG_ERR_UNKNOWN_NAME = 3,
  RIG_ERR_SOLVER = 4,
  RIG_ERR_INTERNAL = 5
} rig_status;

typedef struct rig_framework rig_framework;

RIG_API const char* rig_status_name(rig_status s);

/* Message for the last error on this thread; empty string when none. The
 * pointer stays valid until the next failing call on the same thread. */
RIG_API const char* rig_last_error(void);

RIG_API void rig_string_free(char* s);

/* Framework construction and serialization. JSON schema: {"dimension",
 * "vertices": [[...]], "edges": [[i,j]], "labels"?, "pinned"?}, 1-based
 * indices. */
RIG_API rig_status rig_framework_from_json(const char* json_text, rig_framework** out);
RIG_API rig_status rig_framework_from_corpus(const char* name, rig_framework** out);
RIG_API rig_status rig_framework_to_json(const rig_framework* fw, char** out_json);
RIG_API void rig_framework_free(rig_framework* fw);

/* JSON array of the built-in example names. */
RIG_API rig_status rig_corpus_list(char** out_json);

/* Full analysis. options_json may be NULL or "{}"; recognized keys:
 * lambda_fraction (0.5), sigma_cutoff (1e-7), rank_cutoff (1e-10),
 * pin ("auto" | "none" | "pinned"), verify_samples (0), seed (0),
 * format ("json" | "text", default "json"). */
RIG_API rig_status rig_analyze(const rig_framework* fw, const char* options_json,
                               char** out_report_json);

/* Tensegrity analysis (sign-constrained stresses). Same options. */
RIG_API rig_status rig_tensegrity_analyze(const rig_framework* fw, const char* options_json,
                                          char** out_report_json);

/* CSV over a grid of lambda fractions. options_json keys: grid_start (0.02),
 * grid_end (0.98), grid_count (49), plus the rig_analyze keys. */
RIG_API rig_status rig_sweep_lambda(const rig_framework* fw, const char* options_json,
                                    char** out_csv);

/* Perturb-and-resolve experiment, one CSV row per trial. options_json keys:
 * deltas (array), trials (20), noise (0 = auto), seed (0), plus the
 * rig_analyze keys; sigma_cutoff defaults to 1e-2 here. */
RIG_API rig_status rig_perturb_experiment(const rig_framework* fw, const char* options_json,
                                          char** out_csv);

/* Move the configuration onto the given edge lengths (length per edge,
 * JSON array). options_json keys: delta (9e-16), max_iterations (500),
 * pinned (array of 1-based coordinate indices), align_to_seed (true).
 * On success writes {"configuration": [...], "iterations": n,
 * "max_residual": x}. */
RIG_API rig_status rig_solve_edges(const rig_framework* fw, const char* lengths_json,
                                   const char* options_json, char** out_json);

/* Least distance between two flattened configurations over proper rigid
 * motions. Arrays must have equal length, a multiple of dimension. */
RIG_API rig_status rig_kabsch_distance(const double* qa, const double* qb, size_t len,
                                       int dimension, double* out_distance);

#ifdef __cplusplus
}
#endif

#endif /* RIGIDITY_C_H */
