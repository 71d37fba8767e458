#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "helpers.hpp"
#include "logsum.hpp"
#include "tables.hpp"

using namespace tcbo;

TEST_CASE("table size and strides follow last-variable-fastest order") {
  std::vector<int> cards{2, 3, 4};
  CHECK(table_size(cards) == 24);
  auto s = table_strides(cards);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 12);
  CHECK(s[1] == 4);
  CHECK(s[2] == 1);
  CHECK(table_size({}) == 1);
}

TEST_CASE("odometer enumerates every joint state in table order") {
  Odometer od({2, 3});
  std::vector<std::vector<int>> seen;
  for (; !od.done(); od.advance()) seen.push_back(od.digits());
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == std::vector<int>{0, 0});
  CHECK(seen[1] == std::vector<int>{0, 1});  // last variable advances first
  CHECK(seen[2] == std::vector<int>{0, 2});
  CHECK(seen[3] == std::vector<int>{1, 0});
  CHECK(seen.back() == std::vector<int>{1, 2});
  std::set<std::vector<int>> uniq(seen.begin(), seen.end());
  CHECK(uniq.size() == seen.size());
}

TEST_CASE("restriction map picks the child-scope index of each parent state") {
  // Parent over (0, 2) with cards (2, 3); child is variable 2.
  auto map = restriction_map({0, 2}, {2, 3}, {2}, {3});
  REQUIRE(map.size() == 6);
  // Parent states in table order: (0,0) (0,1) (0,2) (1,0) (1,1) (1,2).
  CHECK(map == std::vector<std::uint32_t>{0, 1, 2, 0, 1, 2});

  // Identity when the scopes coincide.
  auto id = restriction_map({1, 4}, {2, 2}, {1, 4}, {2, 2});
  CHECK(id == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("restriction map rejects a child variable missing from the parent") {
  CHECK_THROWS_AS(restriction_map({0, 1}, {2, 2}, {3}, {2}), Error);
}

TEST_CASE("log-table projection groups by restriction in both modes") {
  // Table over (0,1), cards (2,2): [t00, t01, t10, t11].
  std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  auto onto_1 = restriction_map({0, 1}, {2, 2}, {1}, {2});

  auto mx = project_logtable(t, onto_1, 2, Mode::max);
  CHECK(mx[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mx[1] == doctest::Approx(3.0).epsilon(1e-15));

  auto sm = project_logtable(t, onto_1, 2, Mode::sum);
  CHECK(sm[0] == doctest::Approx(testutil::naive_lse({0.0, 2.0})).epsilon(1e-14));
  CHECK(sm[1] == doctest::Approx(testutil::naive_lse({1.0, 3.0})).epsilon(1e-14));
}

TEST_CASE("projection onto the full scope is the identity") {
  std::mt19937_64 rng(3);
  auto t = testutil::rand_table(rng, 8, 5.0);
  auto id = restriction_map({0, 1, 2}, {2, 2, 2}, {0, 1, 2}, {2, 2, 2});
  auto out = project_logtable(t, id, 8, Mode::sum);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(out[i] == doctest::Approx(t[i]).epsilon(1e-15));
}

TEST_CASE("log_sum_exp is stable far outside double exponent range") {
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({-1000.0, -1000.0}) == doctest::Approx(-1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({0.0, kNegInf}) == doctest::Approx(0.0));
  CHECK(max_value({3.0, -1.0, 7.5}) == 7.5);
}
