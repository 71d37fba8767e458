// Exercises the shared-library interface exactly as an external C client
// would: only tcbo.h, no internal headers.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <unistd.h>
#include <string>
#include <vector>

#include "doctest.h"
#include "tcbo/tcbo.h"

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/tcbo_capi_") + std::to_string(getpid()) + "_" + stem;
}

struct ModelGuard {
  tcbo_model* m = nullptr;
  ~ModelGuard() { tcbo_model_free(m); }
};

struct TraceGuard {
  tcbo_trace* t = nullptr;
  ~TraceGuard() { tcbo_trace_free(t); }
};

}  // namespace

TEST_CASE("status names are stable kebab-case strings") {
  CHECK(std::string(tcbo_status_name(TCBO_OK)) == "ok");
  CHECK(std::string(tcbo_status_name(TCBO_ERR_PARSE)) == "parse");
  CHECK(std::string(tcbo_status_name(TCBO_ERR_UNSUPPORTED_STRUCTURE)) ==
        "unsupported-structure");
  CHECK(std::string(tcbo_status_name(TCBO_ERR_INVALID_COUNTING_NUMBERS)) ==
        "invalid-counting-numbers");
  CHECK(std::string(tcbo_status_name(TCBO_ERR_NOT_A_REPARAMETERIZATION)) ==
        "not-a-reparameterization");
  CHECK(std::string(tcbo_status_name(TCBO_ERR_SCHEDULE_INVALID)) ==
        "schedule-invalid");
}

TEST_CASE("generated models expose shape, cardinalities, and energies") {
  ModelGuard g;
  REQUIRE(tcbo_model_gen_spin_glass(3, 3, 9.0, 1.0, 1, &g.m) == TCBO_OK);
  CHECK(tcbo_model_var_count(g.m) == 9);
  CHECK(tcbo_model_factor_count(g.m) == 21);  // 12 couplings + 9 fields
  CHECK(tcbo_model_cardinality(g.m, 0) == 2);
  CHECK(tcbo_model_cardinality(g.m, 99) == -1);

  std::vector<int> zeros(9, 0);
  double e0 = 0.0, e1 = 0.0;
  REQUIRE(tcbo_model_energy(g.m, zeros.data(), 9, &e0) == TCBO_OK);
  std::vector<int> ones(9, 1);
  REQUIRE(tcbo_model_energy(g.m, ones.data(), 9, &e1) == TCBO_OK);
  CHECK(e0 != e1);
  CHECK(tcbo_model_energy(g.m, zeros.data(), 4, &e0) ==
        TCBO_ERR_DIMENSION_MISMATCH);

  CHECK(tcbo_model_gen_spin_glass(0, 3, 9.0, 1.0, 1, &g.m) ==
        TCBO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("models survive a save/load round trip") {
  ModelGuard a;
  REQUIRE(tcbo_model_gen_spin_glass(2, 3, 9.0, 1.0, 21, &a.m) == TCBO_OK);
  const std::string path = temp_path("roundtrip.model");
  REQUIRE(tcbo_model_save_file(a.m, path.c_str()) == TCBO_OK);

  ModelGuard b;
  REQUIRE(tcbo_model_load_file(path.c_str(), &b.m) == TCBO_OK);
  CHECK(tcbo_model_var_count(b.m) == tcbo_model_var_count(a.m));
  CHECK(tcbo_model_factor_count(b.m) == tcbo_model_factor_count(a.m));
  std::vector<int> x = {1, 0, 1, 0, 1, 0};
  double ea = 0.0, eb = 0.0;
  REQUIRE(tcbo_model_energy(a.m, x.data(), 6, &ea) == TCBO_OK);
  REQUIRE(tcbo_model_energy(b.m, x.data(), 6, &eb) == TCBO_OK);
  CHECK(ea == eb);
  std::remove(path.c_str());

  CHECK(tcbo_model_load_file("/nonexistent/nope.model", &b.m) == TCBO_ERR_IO);
}

TEST_CASE("parse failures set the thread-local error message") {
  ModelGuard g;
  CHECK(tcbo_model_load_string("tcbo-model v2\n1\n2\n0\n", &g.m) ==
        TCBO_ERR_PARSE);
  CHECK(std::strstr(tcbo_last_error(), "line 1") != nullptr);

  const char* truncated = "tcbo-model v1\n2\n2 2\n1\nscope: 0 1\n0 1\n";
  CHECK(tcbo_model_load_string(truncated, &g.m) == TCBO_ERR_PARSE);
  CHECK(std::strstr(tcbo_last_error(), "truncated") != nullptr);

  CHECK(tcbo_model_load_string(nullptr, &g.m) == TCBO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("the exact oracle matches its pinned values") {
  ModelGuard g;
  REQUIRE(tcbo_model_gen_spin_glass(2, 2, 9.0, 1.0, 7, &g.m) == TCBO_OK);
  double logz = 0.0, map = 0.0;
  std::vector<int> assignment(4, -1);
  REQUIRE(tcbo_brute_force(g.m, &logz, &map, assignment.data()) == TCBO_OK);
  CHECK(std::abs(logz - 19.140381336097082) <= 1e-12);
  CHECK(std::abs(map - 19.088290022901397) <= 1e-12);
  CHECK(assignment == (std::vector<int>{1, 0, 1, 1}));

  // NULL out-parameters skip results; NULL model is rejected.
  REQUIRE(tcbo_brute_force(g.m, nullptr, &map, nullptr) == TCBO_OK);
  CHECK(tcbo_brute_force(nullptr, &logz, nullptr, nullptr) ==
        TCBO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("a full solve produces a usable trace") {
  ModelGuard g;
  REQUIRE(tcbo_model_gen_spin_glass(3, 3, 9.0, 1.0, 1, &g.m) == TCBO_OK);

  tcbo_solve_opts opts;
  tcbo_solve_opts_init(&opts);
  CHECK(std::string(opts.algorithm) == "msd");
  CHECK(std::string(opts.mode) == "max");
  CHECK(opts.max_iters == 1000);
  CHECK(opts.bound_tol == 1e-8);

  opts.max_iters = 200;
  TraceGuard tr;
  REQUIRE(tcbo_solve(g.m, &opts, &tr.t) == TCBO_OK);

  const int rows = tcbo_trace_row_count(tr.t);
  REQUIRE(rows >= 2);
  double prev_bound = 0.0;
  for (int i = 0; i < rows; ++i) {
    int sweep = -1;
    double bound = 0.0, adm = 0.0, cons = 0.0, ms = 0.0;
    REQUIRE(tcbo_trace_row(tr.t, i, &sweep, &bound, &adm, &cons, &ms) == TCBO_OK);
    CHECK(sweep == i);
    CHECK(adm <= 1e-9);
    if (i > 0) CHECK(bound <= prev_bound + 1e-9);
    prev_bound = bound;
  }
  CHECK(tcbo_trace_row(tr.t, rows, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        TCBO_ERR_INVALID_ARGUMENT);
  CHECK(std::string(tcbo_trace_termination(tr.t)) == "converged");
  CHECK(std::string(tcbo_trace_structure(tr.t)) == "pair-singleton");

  // MAP side: a decoded assignment whose energy is below the final bound.
  REQUIRE(tcbo_trace_has_map(tr.t) == 1);
  std::vector<int> map(9, -1);
  REQUIRE(tcbo_trace_map_assignment(tr.t, map.data(), 9) == TCBO_OK);
  double map_energy = 0.0;
  REQUIRE(tcbo_model_energy(g.m, map.data(), 9, &map_energy) == TCBO_OK);
  CHECK(map_energy == tcbo_trace_map_energy(tr.t));
  CHECK(map_energy <= tcbo_trace_final_bound(tr.t) + 1e-9);

  double belief[2] = {0.0, 0.0};
  REQUIRE(tcbo_trace_belief(tr.t, 0, belief, 2) == TCBO_OK);
  CHECK(std::abs(belief[0] + belief[1] - 1.0) <= 1e-9);
  CHECK(tcbo_trace_belief(tr.t, 0, belief, 1) == TCBO_ERR_DIMENSION_MISMATCH);
  CHECK(tcbo_trace_belief(tr.t, 9, belief, 2) == TCBO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("solver errors surface as typed statuses") {
  // A triangle is not a grid, so grid chains are rejected.
  ModelGuard tri;
  const char* text =
      "tcbo-model v1\n"
      "3\n"
      "2 2 2\n"
      "3\n"
      "scope: 0 1\n0.5 -0.5 -0.5 0.5\n"
      "scope: 1 2\n0.5 -0.5 -0.5 0.5\n"
      "scope: 0 2\n0.5 -0.5 -0.5 0.5\n";
  REQUIRE(tcbo_model_load_string(text, &tri.m) == TCBO_OK);

  tcbo_solve_opts opts;
  tcbo_solve_opts_init(&opts);
  opts.algorithm = "trws";
  TraceGuard tr;
  CHECK(tcbo_solve(tri.m, &opts, &tr.t) == TCBO_ERR_UNSUPPORTED_STRUCTURE);
  CHECK(std::strlen(tcbo_last_error()) > 0);

  tcbo_solve_opts_init(&opts);
  opts.algorithm = "mplp";
  opts.mode = "sum";
  CHECK(tcbo_solve(tri.m, &opts, &tr.t) == TCBO_ERR_INVALID_ARGUMENT);

  tcbo_solve_opts_init(&opts);
  opts.algorithm = "nonsense";
  CHECK(tcbo_solve(tri.m, &opts, &tr.t) == TCBO_ERR_INVALID_ARGUMENT);

  tcbo_solve_opts_init(&opts);
  CHECK(tcbo_solve(nullptr, &opts, &tr.t) == TCBO_ERR_INVALID_ARGUMENT);
  CHECK(tcbo_solve(tri.m, nullptr, &tr.t) == TCBO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sum-mode solves report no assignment") {
  ModelGuard g;
  REQUIRE(tcbo_model_gen_spin_glass(2, 2, 9.0, 1.0, 7, &g.m) == TCBO_OK);
  tcbo_solve_opts opts;
  tcbo_solve_opts_init(&opts);
  opts.algorithm = "trws";
  opts.mode = "sum";
  TraceGuard tr;
  REQUIRE(tcbo_solve(g.m, &opts, &tr.t) == TCBO_OK);
  CHECK(tcbo_trace_has_map(tr.t) == 0);
  std::vector<int> map(4, -1);
  CHECK(tcbo_trace_map_assignment(tr.t, map.data(), 4) ==
        TCBO_ERR_INVALID_ARGUMENT);
  double logz = 0.0;
  REQUIRE(tcbo_brute_force(g.m, &logz, nullptr, nullptr) == TCBO_OK);
  CHECK(tcbo_trace_final_bound(tr.t) >= logz - 1e-9);
}
