#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "mixsdp/cost_matrix.hpp"
#include "mixsdp/factor_state.hpp"
#include "oracles.hpp"

using namespace mixsdp;

TEST_CASE("from_triplets builds a symmetric pair") {
  const std::vector<Triplet> t{{0, 1, 1.0}, {1, 0, 1.0}};
  const auto c = CostMatrix::from_triplets(2, t);
  CHECK(c.entry(0, 1) == 1.0);
  CHECK(c.entry(1, 0) == 1.0);
  CHECK(c.nonzeros() == 2);
}

TEST_CASE("from_triplets drops the diagonal") {
  const std::vector<Triplet> t{{0, 0, 5.0}};
  const auto c = CostMatrix::from_triplets(3, t);
  CHECK(c.nonzeros() == 0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(c.entry(i, j) == 0.0);
}

TEST_CASE("from_triplets averages a one-sided entry") {
  const std::vector<Triplet> t{{0, 1, 2.0}};
  const auto c = CostMatrix::from_triplets(2, t);
  const auto ref = oracle::symmetrized(2, t);
  CHECK(ref[0][1] == 1.0);
  CHECK(c.entry(0, 1) == ref[0][1]);
  CHECK(c.entry(1, 0) == ref[1][0]);
}

TEST_CASE("from_triplets matches the dense (A + A^T)/2 construction with duplicates") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 9;
    const auto t = oracle::random_triplets(n, 4 * n, seed);
    const auto c = CostMatrix::from_triplets(n, t);
    const auto ref = oracle::symmetrized(n, t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(c.entry(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-14));
  }
}

TEST_CASE("from_triplets rejects bad input") {
  CHECK_THROWS_AS(CostMatrix::from_triplets(0, {}), std::invalid_argument);
  const std::vector<Triplet> bad{{0, 3, 1.0}};
  try {
    CostMatrix::from_triplets(3, bad);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("(0, 3,") != std::string::npos);
  }
  const std::vector<Triplet> nan{{0, 1, std::nan("")}};
  CHECK_THROWS_AS(CostMatrix::from_triplets(2, nan), std::invalid_argument);
}

TEST_CASE("storage invariants: exact symmetry, sorted rows, no diagonal") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 15;
    const auto c = CostMatrix::from_triplets(n, oracle::random_triplets(n, 3 * n, seed + 100));
    for (std::size_t i = 0; i < n; ++i) {
      const auto cols = c.row_columns(i);
      const auto w = c.row_weights(i);
      CHECK(std::adjacent_find(cols.begin(), cols.end(), std::greater_equal<>()) == cols.end());
      for (std::size_t e = 0; e < cols.size(); ++e) {
        CHECK(cols[e] < n);
        CHECK(cols[e] != i);
        CHECK(c.entry(cols[e], i) == w[e]);  // bitwise
      }
    }
  }
}

TEST_CASE("row_gather") {
  SUBCASE("single edge picks up the neighbour") {
    const std::vector<Triplet> t{{0, 1, 1.0}, {1, 0, 1.0}};
    const auto c = CostMatrix::from_triplets(2, t);
    const auto v = FactorMatrix::from_columns(2, 2, {1.0, 0.0, 0.0, 1.0});
    const auto g = row_gather(c, 0, v);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 1.0);
  }
  SUBCASE("all-zero matrix") {
    const auto c = CostMatrix::zero(4);
    const auto v = FactorMatrix::random(3, 4, 1);
    for (std::size_t i = 0; i < 4; ++i)
      for (double x : row_gather(c, i, v)) CHECK(x == 0.0);
  }
  SUBCASE("random 6x6 matches the dense product") {
    const auto c = CostMatrix::from_triplets(6, oracle::random_triplets(6, 20, 7));
    const auto v = FactorMatrix::random(3, 6, 8);
    const auto d = oracle::dense(c);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto g = row_gather(c, i, v);
      const auto ref = oracle::row_times(d, i, v);
      for (std::size_t r = 0; r < 3; ++r) CHECK(g[r] == doctest::Approx(ref[r]).epsilon(1e-13));
    }
  }
}

TEST_CASE("row_gather is linear in V") {
  // Linearity over arbitrary (non-unit) columns: build the combination by hand.
  const std::size_t n = 9;
  const std::size_t k = 4;
  const auto c = CostMatrix::from_triplets(n, oracle::random_triplets(n, 30, 3));
  const auto v1 = FactorMatrix::random(k, n, 4);
  const auto v2 = FactorMatrix::random(k, n, 5);
  const double a = 0.7;
  const double b = -1.3;
  for (std::size_t i = 0; i < n; ++i) {
    const auto g1 = row_gather(c, i, v1);
    const auto g2 = row_gather(c, i, v2);
    std::vector<double> combo(k, 0.0);
    for (std::size_t e = 0; e < c.row_columns(i).size(); ++e) {
      const auto j = c.row_columns(i)[e];
      for (std::size_t r = 0; r < k; ++r)
        combo[r] += c.row_weights(i)[e] * (a * v1.column(j)[r] + b * v2.column(j)[r]);
    }
    for (std::size_t r = 0; r < k; ++r)
      CHECK(std::abs(combo[r] - (a * g1[r] + b * g2[r])) <= 1e-12 * (1.0 + std::abs(combo[r])));
  }
}

TEST_CASE("infinity_norm") {
  const std::vector<Triplet> t{{0, 1, 1.0}, {1, 0, 1.0}};
  CHECK(CostMatrix::from_triplets(2, t).infinity_norm() == 1.0);
  CHECK(CostMatrix::zero(5).infinity_norm() == 0.0);

  const auto c = CostMatrix::from_triplets(8, oracle::random_triplets(8, 25, 11));
  const auto d = oracle::dense(c);
  double ref = 0.0;
  for (const auto& row : d) {
    double s = 0.0;
    for (double x : row) s += std::abs(x);
    ref = std::max(ref, s);
  }
  CHECK(c.infinity_norm() == doctest::Approx(ref).epsilon(1e-14));
}
