#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixsdp/cost_matrix.hpp"
#include "mixsdp/factor_state.hpp"
#include "mixsdp/problems.hpp"

// Reference computations used by tests and the `check` subcommand. None of
// them call into the solver kernels, so agreement with the solver is
// evidence rather than a restatement.
namespace mixsdp::validation {

struct OracleBudget {
  std::size_t max_n_exhaustive = 20;
  double fd_step = 1e-6;
  std::size_t dense_n_cap = 64;
};

struct DiscreteOptimum {
  std::vector<int> x;
  double value;
};

/// Exact minimum of offset + x^T C x over x in {+-1}^n by Gray-code
/// enumeration. Ties resolve to the lexicographically smallest x under
/// +1 < -1, so all-zero C yields the all-ones vector.
DiscreteOptimum brute_force_quadratic(const CostMatrix& c, double offset, const OracleBudget& budget = {});

/// Central difference of f along the retracted curve normalize(v_i + h t_i).
/// `tangent` is k x n column-major with <t_i, v_i> = 0 for every column.
double fd_directional_derivative(const CostMatrix& c, const FactorMatrix& v, std::span<const double> tangent,
                                 const OracleBudget& budget = {});

/// Row-major dense copy of C (diagonal zero).
std::vector<double> to_dense(const CostMatrix& c);

/// Smallest eigenvalue of a dense symmetric row-major n x n matrix.
double dense_smallest_eigenvalue(std::span<const double> a, std::size_t n, const OracleBudget& budget = {});

/// sign(H^+ y) with the minimum-norm least-squares solution.
std::vector<int> zero_forcing_detect(const MimoInstance& inst);

struct CheckOutcome {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

/// Runs monotonicity, w-bounds, descent-gap, recursion-identity and
/// incremental-gradient checks on random Gaussian instances of size n, one
/// instance per seed and beta in {0, 0.4, 0.8}.
std::vector<CheckOutcome> run_invariant_suite(std::size_t n, std::size_t seeds);

}  // namespace mixsdp::validation
