#include "tcbo/tcbo.h"

#include <cstring>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "oracle.hpp"
#include "region_graph.hpp"
#include "solvers.hpp"

struct tcbo_model {
  tcbo::DiscreteModel model;
};

struct tcbo_trace {
  tcbo::SolverTrace trace;
};

namespace {

thread_local std::string g_last_error = "no error";

tcbo_status status_of(tcbo::ErrorKind kind) {
  using tcbo::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return TCBO_ERR_INVALID_ARGUMENT;
    case ErrorKind::parse: return TCBO_ERR_PARSE;
    case ErrorKind::dimension_mismatch: return TCBO_ERR_DIMENSION_MISMATCH;
    case ErrorKind::unsupported_structure: return TCBO_ERR_UNSUPPORTED_STRUCTURE;
    case ErrorKind::invalid_counting_numbers:
      return TCBO_ERR_INVALID_COUNTING_NUMBERS;
    case ErrorKind::schedule_invalid: return TCBO_ERR_SCHEDULE_INVALID;
    case ErrorKind::not_a_reparameterization:
      return TCBO_ERR_NOT_A_REPARAMETERIZATION;
    case ErrorKind::not_a_tree: return TCBO_ERR_NOT_A_TREE;
    case ErrorKind::too_large: return TCBO_ERR_TOO_LARGE;
    case ErrorKind::io: return TCBO_ERR_IO;
  }
  return TCBO_ERR_UNKNOWN;
}

// Runs the body, converting exceptions into statuses + the thread-local
// message. The body only assigns out-parameters on success.
template <typename Fn>
tcbo_status guarded(Fn&& fn) {
  try {
    fn();
    return TCBO_OK;
  } catch (const tcbo::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TCBO_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return TCBO_ERR_UNKNOWN;
  }
}

tcbo_status fail_status(tcbo_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

std::string opt_string(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

const char* tcbo_last_error(void) { return g_last_error.c_str(); }

const char* tcbo_status_name(tcbo_status status) {
  switch (status) {
    case TCBO_OK: return "ok";
    case TCBO_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case TCBO_ERR_PARSE: return "parse";
    case TCBO_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case TCBO_ERR_UNSUPPORTED_STRUCTURE: return "unsupported-structure";
    case TCBO_ERR_INVALID_COUNTING_NUMBERS: return "invalid-counting-numbers";
    case TCBO_ERR_SCHEDULE_INVALID: return "schedule-invalid";
    case TCBO_ERR_NOT_A_REPARAMETERIZATION: return "not-a-reparameterization";
    case TCBO_ERR_NOT_A_TREE: return "not-a-tree";
    case TCBO_ERR_TOO_LARGE: return "too-large";
    case TCBO_ERR_IO: return "io";
    case TCBO_ERR_UNKNOWN: break;
  }
  return "unknown";
}

tcbo_status tcbo_model_load_file(const char* path, tcbo_model** out) {
  if (!path || !out)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null path or out pointer");
  return guarded([&] { *out = new tcbo_model{tcbo::load_model_file(path)}; });
}

tcbo_status tcbo_model_load_string(const char* text, tcbo_model** out) {
  if (!text || !out)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null text or out pointer");
  return guarded([&] {
    std::istringstream is{std::string(text)};
    *out = new tcbo_model{tcbo::load_model(is)};
  });
}

tcbo_status tcbo_model_save_file(const tcbo_model* model, const char* path) {
  if (!model || !path)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null model or path");
  return guarded([&] { tcbo::save_model_file(model->model, path); });
}

tcbo_status tcbo_model_gen_spin_glass(int rows, int cols,
                                      double coupling_half_width,
                                      double field_half_width, uint64_t seed,
                                      tcbo_model** out) {
  if (!out) return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null out pointer");
  return guarded([&] {
    *out = new tcbo_model{tcbo::gen_spin_glass(rows, cols, coupling_half_width,
                                               field_half_width, seed)};
  });
}

void tcbo_model_free(tcbo_model* model) { delete model; }

int tcbo_model_var_count(const tcbo_model* model) {
  return model ? model->model.var_count() : 0;
}

int tcbo_model_factor_count(const tcbo_model* model) {
  return model ? static_cast<int>(model->model.factors().size()) : 0;
}

int tcbo_model_cardinality(const tcbo_model* model, int v) {
  if (!model || v < 0 || v >= model->model.var_count()) return -1;
  return model->model.cardinality(v);
}

tcbo_status tcbo_model_energy(const tcbo_model* model, const int* assignment,
                              int length, double* out) {
  if (!model || !assignment || !out)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null argument");
  if (length != model->model.var_count())
    return fail_status(TCBO_ERR_DIMENSION_MISMATCH,
                       "assignment length differs from the variable count");
  return guarded([&] {
    tcbo::Assignment x(assignment, assignment + length);
    *out = tcbo::energy(model->model, x);
  });
}

tcbo_status tcbo_brute_force(const tcbo_model* model, double* log_partition,
                             double* map_value, int* map_assignment) {
  if (!model) return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null model");
  return guarded([&] {
    const tcbo::ExactResult r = tcbo::brute_force(model->model);
    if (log_partition) *log_partition = r.log_partition;
    if (map_value) *map_value = r.map_value;
    if (map_assignment)
      for (std::size_t v = 0; v < r.map_assignment.size(); ++v)
        map_assignment[v] = r.map_assignment[v];
  });
}

void tcbo_solve_opts_init(tcbo_solve_opts* opts) {
  if (!opts) return;
  opts->algorithm = "msd";
  opts->mode = "max";
  opts->structure = "auto";
  opts->c_pair = 1.0;
  opts->c_singleton = -1.0;
  opts->chains = "grid";
  opts->rows = 0;
  opts->cols = 0;
  opts->max_iters = 1000;
  opts->bound_tol = 1e-8;
  opts->consistency_tol = 1e-6;
  opts->seed = 0;
}

tcbo_status tcbo_solve(const tcbo_model* model, const tcbo_solve_opts* opts,
                       tcbo_trace** out) {
  if (!model || !opts || !out)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const tcbo::DiscreteModel& m = model->model;
    const std::string alg = opt_string(opts->algorithm);
    const std::string mode_name = opt_string(opts->mode);
    const std::string structure = opt_string(opts->structure);
    const std::string chains = opt_string(opts->chains);

    tcbo::Mode mode;
    if (mode_name == "max") {
      mode = tcbo::Mode::max;
    } else if (mode_name == "sum") {
      mode = tcbo::Mode::sum;
    } else {
      tcbo::fail(tcbo::ErrorKind::invalid_argument,
                 "mode must be \"max\" or \"sum\", got \"" + mode_name + "\"");
    }

    tcbo::SolverConfig cfg;
    cfg.mode = mode;
    cfg.max_iters = opts->max_iters;
    cfg.bound_tol = opts->bound_tol;
    cfg.consistency_tol = opts->consistency_tol;
    cfg.seed = opts->seed;
    if (cfg.max_iters < 0)
      tcbo::fail(tcbo::ErrorKind::invalid_argument, "max_iters must be >= 0");

    auto build_region_graph = [&](bool heskes) {
      std::string choice = structure.empty() ? "auto" : structure;
      if (choice == "auto")
        choice = heskes && mode == tcbo::Mode::sum ? "star-edge" : "pair-singleton";
      if (choice == "star-edge") return tcbo::build_star_edge(m);
      if (choice == "pair-singleton") {
        double cs = opts->c_singleton;
        if (cs < 0.0) cs = heskes ? 0.0 : 1.0;
        return tcbo::build_pair_singleton(m, opts->c_pair, cs);
      }
      tcbo::fail(tcbo::ErrorKind::invalid_argument,
                 "structure must be \"auto\", \"pair-singleton\" or "
                 "\"star-edge\", got \"" +
                     choice + "\"");
    };

    auto build_decomposition = [&]() {
      const std::string choice = chains.empty() ? "grid" : chains;
      if (choice == "single") return tcbo::build_path_decomposition(m);
      if (choice == "grid") {
        int rows = opts->rows, cols = opts->cols;
        if (rows <= 0 || cols <= 0) {
          const auto dims = tcbo::infer_grid_dims(m);
          if (!dims)
            tcbo::fail(tcbo::ErrorKind::unsupported_structure,
                       "model edges do not form a grid; pass rows/cols or use "
                       "chains=\"single\"");
          rows = dims->first;
          cols = dims->second;
        }
        return tcbo::build_grid_chain_decomposition(m, rows, cols);
      }
      tcbo::fail(tcbo::ErrorKind::invalid_argument,
                 "chains must be \"grid\" or \"single\", got \"" + choice + "\"");
    };

    tcbo::SolverTrace trace;
    if (alg == "msd") {
      const tcbo::RegionGraph g = build_region_graph(false);
      trace = tcbo::run_msd(m, g, cfg);
    } else if (alg == "heskes") {
      const tcbo::RegionGraph g = build_region_graph(true);
      trace = tcbo::run_heskes(m, g, cfg);
    } else if (alg == "mplp") {
      trace = tcbo::run_mplp(m, cfg);
    } else if (alg == "trws") {
      trace = tcbo::run_trws(m, build_decomposition(), cfg);
    } else if (alg == "trw-forward") {
      trace = tcbo::run_trw_forward(m, build_decomposition(), cfg);
    } else {
      tcbo::fail(tcbo::ErrorKind::invalid_argument,
                 "algorithm must be one of msd, heskes, mplp, trws, "
                 "trw-forward; got \"" +
                     alg + "\"");
    }
    *out = new tcbo_trace{std::move(trace)};
  });
}

void tcbo_trace_free(tcbo_trace* trace) { delete trace; }

int tcbo_trace_row_count(const tcbo_trace* trace) {
  return trace ? static_cast<int>(trace->trace.rows.size()) : 0;
}

tcbo_status tcbo_trace_row(const tcbo_trace* trace, int index, int* sweep,
                           double* bound, double* admissibility_residual,
                           double* consistency_residual, double* elapsed_ms) {
  if (!trace) return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null trace");
  if (index < 0 || index >= static_cast<int>(trace->trace.rows.size()))
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "trace row out of range");
  const tcbo::TraceRow& r = trace->trace.rows[static_cast<std::size_t>(index)];
  if (sweep) *sweep = r.sweep;
  if (bound) *bound = r.bound;
  if (admissibility_residual) *admissibility_residual = r.admissibility_residual;
  if (consistency_residual) *consistency_residual = r.consistency_residual;
  if (elapsed_ms) *elapsed_ms = r.elapsed_ms;
  return TCBO_OK;
}

const char* tcbo_trace_termination(const tcbo_trace* trace) {
  return trace ? trace->trace.termination.c_str() : "";
}

const char* tcbo_trace_structure(const tcbo_trace* trace) {
  return trace ? trace->trace.structure.c_str() : "";
}

double tcbo_trace_final_bound(const tcbo_trace* trace) {
  return trace ? trace->trace.final_bound() : 0.0;
}

tcbo_status tcbo_trace_belief(const tcbo_trace* trace, int v, double* out,
                              int length) {
  if (!trace || !out) return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null argument");
  const auto& beliefs = trace->trace.variable_beliefs;
  if (v < 0 || v >= static_cast<int>(beliefs.size()))
    return fail_status(TCBO_ERR_INVALID_ARGUMENT, "variable out of range");
  const auto& b = beliefs[static_cast<std::size_t>(v)];
  if (length != static_cast<int>(b.size()))
    return fail_status(TCBO_ERR_DIMENSION_MISMATCH,
                       "belief buffer length differs from the cardinality");
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i];
  return TCBO_OK;
}

int tcbo_trace_has_map(const tcbo_trace* trace) {
  return trace && trace->trace.map_assignment ? 1 : 0;
}

tcbo_status tcbo_trace_map_assignment(const tcbo_trace* trace, int* out,
                                      int length) {
  if (!trace || !out) return fail_status(TCBO_ERR_INVALID_ARGUMENT, "null argument");
  if (!trace->trace.map_assignment)
    return fail_status(TCBO_ERR_INVALID_ARGUMENT,
                       "trace has no decoded assignment (sum mode run)");
  const tcbo::Assignment& x = *trace->trace.map_assignment;
  if (length != static_cast<int>(x.size()))
    return fail_status(TCBO_ERR_DIMENSION_MISMATCH,
                       "assignment buffer length differs from the variable count");
  for (std::size_t v = 0; v < x.size(); ++v) out[v] = x[v];
  return TCBO_OK;
}

double tcbo_trace_map_energy(const tcbo_trace* trace) {
  return trace ? trace->trace.map_energy : 0.0;
}

}  // extern "C"
