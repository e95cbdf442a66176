#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mixsdp/problems.hpp"
#include "mixsdp/rounding.hpp"
#include "mixsdp/solver.hpp"
#include "mixsdp/validation.hpp"
#include "oracles.hpp"

using namespace mixsdp;

namespace {

MaxCutInstance cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return MaxCutInstance::from_edges(n, edges);
}

FactorMatrix converge(const Reduction& red, std::uint64_t seed, std::size_t rank = 0) {
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.epsilon = 1e-9;
  if (rank) cfg.rank = rank;
  return solve(red.cost, red.value.offset, cfg).v;
}

}  // namespace

TEST_CASE("round_maxcut") {
  SUBCASE("rank one input returns the embedded cut every trial") {
    const auto inst = cycle(5);
    const std::vector<int> x{1, -1, 1, -1, -1};
    const auto rep = round_maxcut(oracle::embed(x), inst, 20, 3);
    const double embedded = cut_value(inst, x);
    CHECK(embedded == 4.0);
    REQUIRE(rep.per_trial_values.size() == 20);
    for (double value : rep.per_trial_values) CHECK(value == embedded);
  }
  SUBCASE("antipodal pair is always cut") {
    const std::vector<Edge> one{{0, 1, 1.0}};
    const auto inst = MaxCutInstance::from_edges(2, one);
    const auto v = FactorMatrix::from_columns(3, 2, {0.2, -0.4, 0.8, -0.2, 0.4, -0.8});
    const auto rep = round_maxcut(v, inst, 100, 0);
    for (double value : rep.per_trial_values) CHECK(value == 1.0);
  }
  SUBCASE("5-cycle reaches the discrete optimum") {
    const auto inst = cycle(5);
    const auto rep = round_maxcut(converge(maxcut_to_cost(inst), 1), inst, 200, 2);
    CHECK(rep.best_value == 4.0);
  }
  SUBCASE("zero trials are rejected") {
    CHECK_THROWS(round_maxcut(oracle::embed({1, 1}), cycle(2), 0, 0));
  }
}

TEST_CASE("round_maxsat") {
  SUBCASE("embedded satisfying assignment scores every clause at trial 0") {
    const auto inst = random_ksat(6, 15, 3, 4);
    std::vector<int> x;
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
      x = oracle::bits(mask, 6);
      if (satisfied_clauses(inst, x) == 15) break;
    }
    REQUIRE(satisfied_clauses(inst, x) == 15);
    auto z = x;
    z.push_back(1);
    const auto rep = round_maxsat(oracle::embed(z), inst, 5, 0);
    CHECK(rep.per_trial_values[0] == 15.0);
    CHECK(rep.assignment == x);
  }
  SUBCASE("empty formula scores zero") {
    MaxSatInstance inst{4, {}};
    const auto rep = round_maxsat(FactorMatrix::random(3, 5, 1), inst, 10, 0);
    for (double value : rep.per_trial_values) CHECK(value == 0.0);
  }
  SUBCASE("small formulas reach the exhaustive optimum") {
    std::size_t hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto inst = random_ksat(3, 8, 3, seed + 1000);
      std::size_t best = 0;
      for (std::uint64_t mask = 0; mask < 8; ++mask)
        best = std::max(best, satisfied_clauses(inst, oracle::bits(mask, 3)));
      const auto rep = round_maxsat(converge(maxsat_to_cost(inst), seed), inst, 100, seed);
      hits += rep.best_value == static_cast<double>(best) ? 1 : 0;
    }
    CHECK(hits >= 95);
  }
}

TEST_CASE("detect_mimo") {
  SUBCASE("noiseless identity channel") {
    MimoInstance inst;
    inst.m = 3;
    inst.n = 3;
    inst.h = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    inst.y = {1, -1, -1};
    const auto det = detect_mimo(converge(mimo_to_cost(inst), 0), inst);
    CHECK(det.x == std::vector<int>{1, -1, -1});
    CHECK(det.residual == doctest::Approx(0.0));
  }
  SUBCASE("columns opposite the truth decode to -1") {
    MimoInstance inst;
    inst.m = 1;
    inst.n = 2;
    inst.h = {1, 1};
    inst.y = {0};
    const auto v = FactorMatrix::from_columns(2, 3, {0.0, -1.0, 0.0, -1.0, 0.0, 1.0});
    CHECK(detect_mimo(v, inst).x == std::vector<int>{-1, -1});
  }
  SUBCASE("beats zero-forcing on most 8x8 channels") {
    std::size_t wins = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto s = simulate_mimo(8, 8, 16.0, seed);
      const auto det = detect_mimo(converge(mimo_to_cost(s.instance), seed), s.instance);
      const auto zf = validation::zero_forcing_detect(s.instance);
      wins += det.residual <= mimo_residual(s.instance, zf) ? 1 : 0;
    }
    CHECK(wins >= 40);
  }
}

TEST_CASE("rounding invariants") {
  const auto inst = erdos_renyi(40, 0.15, 3);
  const auto v = converge(maxcut_to_cost(inst), 3);
  const auto a = round_maxcut(v, inst, 30, 9);
  const auto b = round_maxcut(v, inst, 30, 9);
  CHECK(a.best_value == b.best_value);
  CHECK(a.assignment == b.assignment);
  CHECK(a.per_trial_values == b.per_trial_values);
  CHECK(cut_value(inst, a.assignment) == a.best_value);
  CHECK(a.best_value == *std::max_element(a.per_trial_values.begin(), a.per_trial_values.end()));

  double prev = -1.0;
  for (std::size_t trials : {1u, 5u, 10u, 30u, 60u}) {
    const auto r = round_maxcut(v, inst, trials, 9);
    CHECK(r.best_value >= prev);
    const std::size_t shared = std::min<std::size_t>(trials, 30);
    CHECK(std::equal(r.per_trial_values.begin(), r.per_trial_values.begin() + shared, a.per_trial_values.begin()));
    prev = r.best_value;
  }

  const auto formula = random_ksat(12, 50, 3, 8);
  const auto vs = converge(maxsat_to_cost(formula), 8);
  const auto rs = round_maxsat(vs, formula, 40, 1);
  CHECK(static_cast<double>(satisfied_clauses(formula, rs.assignment)) == rs.best_value);
  CHECK(rs.best_value == *std::max_element(rs.per_trial_values.begin(), rs.per_trial_values.end()));
}
