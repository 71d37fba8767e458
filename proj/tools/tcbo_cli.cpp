// Command-line front end: generate spin-glass instances, run a solver and
// emit its per-sweep trace, or race several solvers on one model.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 model or solver
// failure (the kebab-case status name prefixes the message).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcbo/tcbo.h"

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int fail_usage(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

int fail_runtime(tcbo_status status, const std::string& message) {
  std::cerr << "error: " << tcbo_status_name(status) << ": " << message << "\n";
  return 3;
}

struct ModelHandle {
  tcbo_model* m = nullptr;
  ~ModelHandle() { tcbo_model_free(m); }
};

struct TraceHandle {
  tcbo_trace* t = nullptr;
  TraceHandle() = default;
  explicit TraceHandle(tcbo_trace* p) : t(p) {}
  TraceHandle(TraceHandle&& o) noexcept : t(o.t) { o.t = nullptr; }
  TraceHandle& operator=(TraceHandle&& o) noexcept {
    if (this != &o) {
      tcbo_trace_free(t);
      t = o.t;
      o.t = nullptr;
    }
    return *this;
  }
  TraceHandle(const TraceHandle&) = delete;
  TraceHandle& operator=(const TraceHandle&) = delete;
  ~TraceHandle() { tcbo_trace_free(t); }
};

// Everything a solver run needs besides the algorithm name; flag values are
// shared between solve and compare.
struct SolveParams {
  std::string mode = "max";
  std::string structure = "auto";
  double c_pair = 1.0;
  double c_singleton = -1.0;  // -1: algorithm default
  std::string chains = "grid";
  int rows = 0;
  int cols = 0;
  int max_iters = 1000;
  double bound_tol = 1e-8;
  double consistency_tol = 1e-6;
  std::uint64_t seed = 0;
};

tcbo_status solve_one(const tcbo_model* model, const SolveParams& p,
                      const std::string& algorithm, tcbo_trace** out) {
  tcbo_solve_opts o;
  tcbo_solve_opts_init(&o);
  o.algorithm = algorithm.c_str();
  o.mode = p.mode.c_str();
  o.structure = p.structure.c_str();
  o.c_pair = p.c_pair;
  o.c_singleton = p.c_singleton;
  o.chains = p.chains.c_str();
  o.rows = p.rows;
  o.cols = p.cols;
  o.max_iters = p.max_iters;
  o.bound_tol = p.bound_tol;
  o.consistency_tol = p.consistency_tol;
  o.seed = p.seed;
  return tcbo_solve(model, &o, out);
}

nlohmann::json run_spec_json(const std::string& command, const std::string& model,
                             const std::vector<std::string>& algorithms,
                             const SolveParams& p, const std::string& format,
                             const std::string& out) {
  nlohmann::json spec;
  spec["command"] = command;
  spec["model"] = model;
  if (algorithms.size() == 1)
    spec["algorithm"] = algorithms[0];
  else
    spec["algorithms"] = algorithms;
  spec["mode"] = p.mode;
  spec["structure"] = p.structure;
  spec["c_pair"] = p.c_pair;
  spec["c_singleton"] = p.c_singleton;
  spec["chains"] = p.chains;
  spec["rows"] = p.rows;
  spec["cols"] = p.cols;
  spec["max_iters"] = p.max_iters;
  spec["bound_tol"] = p.bound_tol;
  spec["consistency_tol"] = p.consistency_tol;
  spec["seed"] = p.seed;
  spec["format"] = format;
  spec["out"] = out;
  return spec;
}

// Writes `text` to the path, or to stdout when the path is empty; returns the
// stream summaries should go to (stdout stays clean when it carries the trace).
std::ostream* emit_payload(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return &std::cerr;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: io: cannot write " << out_path << "\n";
    return nullptr;
  }
  f << text;
  return &std::cout;
}

struct Verdict {
  bool monotone = true;
  std::vector<int> rise_sweeps;
  double max_rise = 0.0;
};

Verdict monotonicity(const tcbo_trace* t) {
  Verdict v;
  double prev = 0.0;
  for (int r = 0; r < tcbo_trace_row_count(t); ++r) {
    int sweep = 0;
    double bound = 0.0;
    tcbo_trace_row(t, r, &sweep, &bound, nullptr, nullptr, nullptr);
    if (r > 0 && bound - prev > 1e-9) {
      v.monotone = false;
      v.rise_sweeps.push_back(sweep);
      v.max_rise = std::max(v.max_rise, bound - prev);
    }
    prev = bound;
  }
  return v;
}

std::string verdict_text(const Verdict& v) {
  if (v.monotone) return "monotone";
  std::string s = "rises at sweeps ";
  const std::size_t shown = std::min<std::size_t>(v.rise_sweeps.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) s += ",";
    s += std::to_string(v.rise_sweeps[i]);
  }
  if (v.rise_sweeps.size() > shown)
    s += ",+" + std::to_string(v.rise_sweeps.size() - shown) + " more";
  s += " (max rise " + fmt17(v.max_rise) + ")";
  return s;
}

int run_gen(int rows, int cols, double coupling, double field, std::uint64_t seed,
            const std::string& out) {
  tcbo_model* m = nullptr;
  tcbo_status s = tcbo_model_gen_spin_glass(rows, cols, coupling, field, seed, &m);
  if (s != TCBO_OK) return fail_runtime(s, tcbo_last_error());
  ModelHandle guard{m};
  s = tcbo_model_save_file(m, out.c_str());
  if (s != TCBO_OK) return fail_runtime(s, tcbo_last_error());
  std::cout << "wrote " << out << ": " << tcbo_model_var_count(m) << " variables, "
            << tcbo_model_factor_count(m) << " factors\n";
  return 0;
}

std::string trace_csv(const tcbo_trace* t) {
  std::string s = "sweep,bound,admissibility_residual,consistency_residual,elapsed_ms\n";
  for (int r = 0; r < tcbo_trace_row_count(t); ++r) {
    int sweep = 0;
    double bound = 0, adm = 0, cons = 0, ms = 0;
    tcbo_trace_row(t, r, &sweep, &bound, &adm, &cons, &ms);
    s += std::to_string(sweep) + "," + fmt17(bound) + "," + fmt17(adm) + "," +
         fmt17(cons) + "," + fmt17(ms) + "\n";
  }
  return s;
}

int run_solve(const std::string& model_path, const std::string& algorithm,
              const SolveParams& p, const std::string& format,
              const std::string& out) {
  tcbo_model* raw = nullptr;
  tcbo_status s = tcbo_model_load_file(model_path.c_str(), &raw);
  if (s != TCBO_OK) return fail_runtime(s, tcbo_last_error());
  ModelHandle model{raw};

  tcbo_trace* traw = nullptr;
  s = solve_one(model.m, p, algorithm, &traw);
  if (s != TCBO_OK) return fail_runtime(s, tcbo_last_error());
  TraceHandle trace{traw};

  const bool has_map = tcbo_trace_has_map(trace.t) != 0;
  std::string payload;
  if (format == "csv") {
    payload = trace_csv(trace.t);
  } else {
    nlohmann::json j;
    j["run_spec"] = run_spec_json("solve", model_path, {algorithm}, p, format, out);
    j["structure"] = tcbo_trace_structure(trace.t);
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < tcbo_trace_row_count(trace.t); ++r) {
      int sweep = 0;
      double bound = 0, adm = 0, cons = 0, ms = 0;
      tcbo_trace_row(trace.t, r, &sweep, &bound, &adm, &cons, &ms);
      rows.push_back({{"sweep", sweep},
                      {"bound", bound},
                      {"admissibility_residual", adm},
                      {"consistency_residual", cons},
                      {"elapsed_ms", ms}});
    }
    j["rows"] = std::move(rows);
    j["termination"] = tcbo_trace_termination(trace.t);
    j["final_bound"] = tcbo_trace_final_bound(trace.t);
    if (has_map) {
      std::vector<int> x(static_cast<std::size_t>(tcbo_model_var_count(model.m)));
      tcbo_trace_map_assignment(trace.t, x.data(), static_cast<int>(x.size()));
      j["map_assignment"] = x;
      j["map_energy"] = tcbo_trace_map_energy(trace.t);
    }
    payload = j.dump(2) + "\n";
  }

  std::ostream* console = emit_payload(out, payload);
  if (!console) return 3;
  *console << "final bound: " << fmt17(tcbo_trace_final_bound(trace.t)) << "\n"
           << "termination: " << tcbo_trace_termination(trace.t) << "\n";
  if (has_map)
    *console << "map energy: " << fmt17(tcbo_trace_map_energy(trace.t)) << "\n";
  return 0;
}

int compare_threads() {
  const char* env = std::getenv("TCBO_THREADS");
  if (!env) return 1;
  const int t = std::atoi(env);
  return t < 1 ? 1 : (t > 64 ? 64 : t);
}

int run_compare(const std::string& model_path, const std::vector<std::string>& algs,
                const SolveParams& p, const std::string& format,
                const std::string& out) {
  tcbo_model* raw = nullptr;
  tcbo_status s = tcbo_model_load_file(model_path.c_str(), &raw);
  if (s != TCBO_OK) return fail_runtime(s, tcbo_last_error());
  ModelHandle model{raw};

  const std::size_t n = algs.size();
  std::vector<TraceHandle> traces(n);
  std::vector<tcbo_status> statuses(n, TCBO_OK);
  std::vector<std::string> errors(n);

  // Solving only reads the model, so concurrent runs on one handle are safe.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      tcbo_trace* t = nullptr;
      statuses[i] = solve_one(model.m, p, algs[i], &t);
      if (statuses[i] != TCBO_OK)
        errors[i] = tcbo_last_error();
      else
        traces[i] = TraceHandle{t};
    }
  };
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(compare_threads()), n);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (statuses[i] != TCBO_OK)
      return fail_runtime(statuses[i], algs[i] + ": " + errors[i]);

  // Duplicate algorithm names get a numeric suffix so columns stay unique.
  std::vector<std::string> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    int seen = 1;
    for (std::size_t k = 0; k < i; ++k)
      if (algs[k] == algs[i]) ++seen;
    columns[i] = seen == 1 ? algs[i] : algs[i] + "_" + std::to_string(seen);
  }

  int max_rows = 0;
  for (const auto& t : traces)
    max_rows = std::max(max_rows, tcbo_trace_row_count(t.t));

  std::vector<Verdict> verdicts(n);
  for (std::size_t i = 0; i < n; ++i) verdicts[i] = monotonicity(traces[i].t);

  double max_gap = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double fa = tcbo_trace_final_bound(traces[a].t);
      const double fb = tcbo_trace_final_bound(traces[b].t);
      const double scale = std::max({1e-12, std::abs(fa), std::abs(fb)});
      max_gap = std::max(max_gap, std::abs(fa - fb) / scale);
    }

  std::string payload;
  if (format == "csv") {
    std::string header = "sweep";
    for (const auto& c : columns) header += ",bound_" + c;
    payload = header + "\n";
    for (int r = 0; r < max_rows; ++r) {
      std::string line = std::to_string(r);
      for (const auto& t : traces) {
        line += ",";
        if (r < tcbo_trace_row_count(t.t)) {
          double bound = 0.0;
          tcbo_trace_row(t.t, r, nullptr, &bound, nullptr, nullptr, nullptr);
          line += fmt17(bound);
        }
      }
      payload += line + "\n";
    }
  } else {
    nlohmann::json j;
    j["run_spec"] = run_spec_json("compare", model_path, algs, p, format, out);
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      nlohmann::json a;
      a["algorithm"] = algs[i];
      a["column"] = "bound_" + columns[i];
      std::vector<double> bounds;
      for (int r = 0; r < tcbo_trace_row_count(traces[i].t); ++r) {
        double bound = 0.0;
        tcbo_trace_row(traces[i].t, r, nullptr, &bound, nullptr, nullptr, nullptr);
        bounds.push_back(bound);
      }
      a["bounds"] = bounds;
      a["final_bound"] = tcbo_trace_final_bound(traces[i].t);
      a["termination"] = tcbo_trace_termination(traces[i].t);
      a["monotone"] = verdicts[i].monotone;
      a["rise_sweeps"] = verdicts[i].rise_sweeps;
      a["max_rise"] = verdicts[i].max_rise;
      arr.push_back(std::move(a));
    }
    j["algorithms"] = std::move(arr);
    j["max_pairwise_relative_gap"] = max_gap;
    payload = j.dump(2) + "\n";
  }

  std::ostream* console = emit_payload(out, payload);
  if (!console) return 3;
  for (std::size_t i = 0; i < n; ++i)
    *console << columns[i] << ": final bound "
             << fmt17(tcbo_trace_final_bound(traces[i].t)) << ", termination "
             << tcbo_trace_termination(traces[i].t) << ", "
             << verdict_text(verdicts[i]) << "\n";
  *console << "max pairwise relative gap: " << fmt17(max_gap) << "\n";
  return 0;
}

const std::vector<std::string> kAlgorithms = {"msd", "heskes", "mplp", "trws",
                                              "trw-forward"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tcbo: convergent message-passing bounds for discrete pairwise models"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a seeded spin-glass model file");
  int g_rows = 0, g_cols = 0;
  double g_coupling = 9.0, g_field = 1.0;
  std::uint64_t g_seed = 0;
  std::string g_out;
  gen->add_option("--rows", g_rows, "grid rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("--cols", g_cols, "grid columns")->required()->check(CLI::PositiveNumber);
  gen->add_option("--coupling", g_coupling,
                  "couplings drawn uniformly from [-coupling, +coupling]")
      ->capture_default_str();
  gen->add_option("--field", g_field,
                  "fields drawn uniformly from [-field, +field]")
      ->capture_default_str();
  gen->add_option("--seed", g_seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--out", g_out, "output model file")->required();

  // shared solver flags
  SolveParams params;
  std::string s_model, s_alg, s_format = "csv", s_out;
  std::vector<std::string> c_algs;

  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", params.mode, "max (MAP bound) or sum (log-partition bound)")
        ->check(CLI::IsMember({"max", "sum"}))
        ->capture_default_str();
    cmd->add_option("--structure", params.structure,
                    "region graph for msd/heskes: auto, pair-singleton, star-edge")
        ->check(CLI::IsMember({"auto", "pair-singleton", "star-edge"}))
        ->capture_default_str();
    cmd->add_option("--c-pair", params.c_pair, "pair counting number (pair-singleton)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--c-singleton", params.c_singleton,
                    "singleton counting number; default 1 for msd, 0 for heskes");
    cmd->add_option("--chains", params.chains,
                    "decomposition for trws/trw-forward: grid or single")
        ->check(CLI::IsMember({"grid", "single"}))
        ->capture_default_str();
    cmd->add_option("--rows", params.rows, "grid rows for --chains grid (0 = infer)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--cols", params.cols, "grid columns for --chains grid (0 = infer)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iters", params.max_iters, "sweep limit")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--bound-tol", params.bound_tol,
                    "stop when a sweep improves the bound by less than this")
        ->capture_default_str();
    cmd->add_option("--consistency-tol", params.consistency_tol,
                    "reporting threshold for the consistency residual")
        ->capture_default_str();
    cmd->add_option("--seed", params.seed, "seed for probe assignments")
        ->capture_default_str();
    cmd->add_option("--format", s_format, "trace format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("-o,--out", s_out, "trace output path (default: stdout)");
  };

  auto* solve = app.add_subcommand("solve", "run one solver and emit its trace");
  solve->add_option("model", s_model, "model file")->required();
  solve->add_option("--alg", s_alg, "msd, heskes, mplp, trws, trw-forward")
      ->required()
      ->check(CLI::IsMember(kAlgorithms));
  add_solver_flags(solve);

  auto* compare = app.add_subcommand(
      "compare", "run several solvers on one model and tabulate their bounds");
  compare->add_option("model", s_model, "model file")->required();
  compare->add_option("--algs", c_algs, "comma-separated algorithm list")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(kAlgorithms));
  add_solver_flags(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  if (*gen) return run_gen(g_rows, g_cols, g_coupling, g_field, g_seed, g_out);

  // Flag/algorithm combinations that cannot run are usage errors, caught
  // before any model work starts.
  auto combo_error = [&](CLI::App* cmd,
                         const std::vector<std::string>& algorithms) -> int {
    auto uses = [&](std::initializer_list<const char*> names) {
      bool any = false;
      for (const auto& a : algorithms)
        for (const char* x : names) any = any || a == x;
      return any;
    };
    const bool region_based = uses({"msd", "heskes"});
    const bool chain_based = uses({"trws", "trw-forward"});
    if (params.mode == "sum" && uses({"mplp"}))
      return fail_usage("mplp runs in max mode; use --alg heskes --mode sum for "
                        "the star-edge sum bound");
    if (cmd->count("--structure") && !region_based)
      return fail_usage("--structure applies to msd and heskes only");
    if ((cmd->count("--c-pair") || cmd->count("--c-singleton")) && !region_based)
      return fail_usage("counting-number flags apply to msd and heskes only");
    if ((cmd->count("--c-pair") || cmd->count("--c-singleton")) &&
        params.structure == "star-edge")
      return fail_usage("counting-number flags apply to pair-singleton graphs");
    if ((cmd->count("--chains") || cmd->count("--rows") || cmd->count("--cols")) &&
        !chain_based)
      return fail_usage("--chains/--rows/--cols apply to trws and trw-forward only");
    if (cmd->count("--c-singleton") && params.c_singleton < 0.0)
      return fail_usage("--c-singleton must be >= 0");
    return 0;
  };

  if (*solve) {
    if (int rc = combo_error(solve, {s_alg}); rc != 0) return rc;
    return run_solve(s_model, s_alg, params, s_format, s_out);
  }

  if (c_algs.size() < 2)
    return fail_usage("compare needs at least two algorithms (--algs a,b)");
  if (int rc = combo_error(compare, c_algs); rc != 0) return rc;
  return run_compare(s_model, c_algs, params, s_format, s_out);
}
