/* tcbo: convergent message-passing bounds for discrete pairwise models.
 *
 * C interface to the solver library. All functions are thread-safe as long
 * as each handle is mutated by one thread at a time; concurrent solves that
 * share a model handle are fine because solving never mutates the model.
 *
 * Every fallible call returns a tcbo_status; on failure the thread-local
 * message from tcbo_last_error() describes what went wrong. Out-parameters
 * are written only on TCBO_OK.
 */
#ifndef TCBO_H
#define TCBO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TCBO_API __declspec(dllexport)
#else
#define TCBO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tcbo_status {
  TCBO_OK = 0,
  TCBO_ERR_INVALID_ARGUMENT = 1,
  TCBO_ERR_PARSE = 2,
  TCBO_ERR_DIMENSION_MISMATCH = 3,
  TCBO_ERR_UNSUPPORTED_STRUCTURE = 4,
  TCBO_ERR_INVALID_COUNTING_NUMBERS = 5,
  TCBO_ERR_SCHEDULE_INVALID = 6,
  TCBO_ERR_NOT_A_REPARAMETERIZATION = 7,
  TCBO_ERR_NOT_A_TREE = 8,
  TCBO_ERR_TOO_LARGE = 9,
  TCBO_ERR_IO = 10,
  TCBO_ERR_UNKNOWN = 11
} tcbo_status;

/* Message describing the most recent failure on this thread; never NULL.
 * Valid until the next failing tcbo_* call on the same thread. */
TCBO_API const char* tcbo_last_error(void);

/* Short kebab-case name of a status ("unsupported-structure", ...). */
TCBO_API const char* tcbo_status_name(tcbo_status status);

/* ------------------------------------------------------------------ */
/* Models                                                              */

typedef struct tcbo_model tcbo_model;

/* Parse a model file (format documented in README / model_io). */
TCBO_API tcbo_status tcbo_model_load_file(const char* path, tcbo_model** out);
TCBO_API tcbo_status tcbo_model_load_string(const char* text, tcbo_model** out);
TCBO_API tcbo_status tcbo_model_save_file(const tcbo_model* model, const char* path);

/* Seeded rows x cols binary spin glass: couplings uniform in
 * [-coupling_half_width, +coupling_half_width], fields uniform in
 * [-field_half_width, +field_half_width]; identical seeds give identical
 * models on every platform. */
TCBO_API tcbo_status tcbo_model_gen_spin_glass(int rows, int cols,
                                               double coupling_half_width,
                                               double field_half_width,
                                               uint64_t seed, tcbo_model** out);

TCBO_API void tcbo_model_free(tcbo_model* model);

TCBO_API int tcbo_model_var_count(const tcbo_model* model);
TCBO_API int tcbo_model_factor_count(const tcbo_model* model);
/* Cardinality of variable v, or -1 if v is out of range. */
TCBO_API int tcbo_model_cardinality(const tcbo_model* model, int v);

/* Sum of log potentials at the assignment (length = var_count). */
TCBO_API tcbo_status tcbo_model_energy(const tcbo_model* model,
                                       const int* assignment, int length,
                                       double* out);

/* ------------------------------------------------------------------ */
/* Exact oracle (models up to 2^20 joint states)                       */

/* Any out-pointer may be NULL to skip that result. map_assignment, when
 * given, must have room for var_count ints. */
TCBO_API tcbo_status tcbo_brute_force(const tcbo_model* model,
                                      double* log_partition, double* map_value,
                                      int* map_assignment);

/* ------------------------------------------------------------------ */
/* Solvers                                                             */

typedef struct tcbo_trace tcbo_trace;

typedef struct tcbo_solve_opts {
  /* "msd" | "heskes" | "mplp" | "trws" | "trw-forward" */
  const char* algorithm;
  /* "max" (MAP bound) | "sum" (log-partition bound) */
  const char* mode;
  /* msd/heskes: "auto" | "pair-singleton" | "star-edge".
   * auto means pair-singleton for msd, pair-singleton with c_singleton = 0
   * for heskes in max mode, star-edge for heskes in sum mode. */
  const char* structure;
  /* Counting numbers for pair-singleton graphs. c_singleton < 0 picks the
   * algorithm default (1 for msd, 0 for heskes). */
  double c_pair;
  double c_singleton;
  /* trws/trw-forward: "grid" (row+column chains, rho = 1/2) | "single"
   * (one path 0-1-...-n-1, rho = 1). */
  const char* chains;
  /* Grid shape for chains = "grid"; 0 infers it from the edge set. */
  int rows;
  int cols;
  int max_iters;
  double bound_tol;
  double consistency_tol;
  uint64_t seed;
} tcbo_solve_opts;

/* Fill with defaults: msd, max, auto structure, grid chains, 1000 sweeps,
 * bound_tol 1e-8, consistency_tol 1e-6, seed 0. */
TCBO_API void tcbo_solve_opts_init(tcbo_solve_opts* opts);

TCBO_API tcbo_status tcbo_solve(const tcbo_model* model,
                                const tcbo_solve_opts* opts, tcbo_trace** out);

TCBO_API void tcbo_trace_free(tcbo_trace* trace);

/* Row 0 is the state before any sweep. */
TCBO_API int tcbo_trace_row_count(const tcbo_trace* trace);
TCBO_API tcbo_status tcbo_trace_row(const tcbo_trace* trace, int index,
                                    int* sweep, double* bound,
                                    double* admissibility_residual,
                                    double* consistency_residual,
                                    double* elapsed_ms);

/* "converged" | "max_iters" | "message_fixed_point" */
TCBO_API const char* tcbo_trace_termination(const tcbo_trace* trace);
/* Region-graph / decomposition label the bound was computed on. */
TCBO_API const char* tcbo_trace_structure(const tcbo_trace* trace);
TCBO_API double tcbo_trace_final_bound(const tcbo_trace* trace);

/* Normalized belief over the states of variable v; `out` must have room for
 * the variable's cardinality. */
TCBO_API tcbo_status tcbo_trace_belief(const tcbo_trace* trace, int v,
                                       double* out, int length);

/* 1 when the run decoded an assignment (max mode), else 0. */
TCBO_API int tcbo_trace_has_map(const tcbo_trace* trace);
/* Decoded assignment (length = var_count) and its energy. */
TCBO_API tcbo_status tcbo_trace_map_assignment(const tcbo_trace* trace, int* out,
                                               int length);
TCBO_API double tcbo_trace_map_energy(const tcbo_trace* trace);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TCBO_H */
