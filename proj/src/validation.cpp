#include "mixsdp/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "mixsdp/solver.hpp"

namespace mixsdp::validation {

namespace {

double quadratic(const CostMatrix& c, std::span<const int> x) {
  double value = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto cols = c.row_columns(i);
    const auto weights = c.row_weights(i);
    for (std::size_t e = 0; e < cols.size(); ++e) value += weights[e] * x[i] * x[cols[e]];
  }
  return value;
}

// Key ordering the lexicographic tie-break: index 0 is the most significant
// position and -1 sorts after +1.
std::uint64_t lex_key(std::span<const int> x) {
  std::uint64_t key = 0;
  for (int xi : x) key = (key << 1) | (xi < 0 ? 1u : 0u);
  return key;
}

double dense_objective(const CostMatrix& c, std::span<const double> cols, std::size_t k) {
  double f = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto idx = c.row_columns(i);
    const auto weights = c.row_weights(i);
    for (std::size_t e = 0; e < idx.size(); ++e) {
      double inner = 0.0;
      for (std::size_t r = 0; r < k; ++r) inner += cols[i * k + r] * cols[idx[e] * k + r];
      f += weights[e] * inner;
    }
  }
  return f;
}

std::vector<double> retract(std::span<const double> v, std::span<const double> t, double h, std::size_t k) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size() / k; ++i) {
    double len = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      out[i * k + r] = v[i * k + r] + h * t[i * k + r];
      len += out[i * k + r] * out[i * k + r];
    }
    len = std::sqrt(len);
    for (std::size_t r = 0; r < k; ++r) out[i * k + r] /= len;
  }
  return out;
}

}  // namespace

DiscreteOptimum brute_force_quadratic(const CostMatrix& c, double offset, const OracleBudget& budget) {
  const std::size_t n = c.size();
  if (n > budget.max_n_exhaustive || n > 62)
    throw std::invalid_argument("brute force limited to n <= " + std::to_string(budget.max_n_exhaustive));

  std::vector<int> x(n, 1);
  double value = quadratic(c, x);
  std::vector<int> best = x;
  double best_value = value;
  const double tie = 1e-12 * (1.0 + c.total_weight() + c.infinity_norm() * static_cast<double>(n));

  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < count; ++step) {
    // Gray code: step flips the bit at the position of its lowest set bit.
    const auto i = static_cast<std::size_t>(std::countr_zero(step));
    double s = 0.0;
    const auto cols = c.row_columns(i);
    const auto weights = c.row_weights(i);
    for (std::size_t e = 0; e < cols.size(); ++e) s += weights[e] * x[cols[e]];
    value -= 4.0 * x[i] * s;
    x[i] = -x[i];
    if (value < best_value - tie || (value <= best_value + tie && lex_key(x) < lex_key(best))) {
      best_value = std::min(value, best_value);
      best = x;
    }
  }
  return {best, offset + quadratic(c, best)};
}

double fd_directional_derivative(const CostMatrix& c, const FactorMatrix& v, std::span<const double> tangent,
                                 const OracleBudget& budget) {
  const std::size_t k = v.rank();
  if (tangent.size() != k * v.size()) throw std::invalid_argument("tangent has the wrong shape");
  for (std::size_t i = 0; i < v.size(); ++i) {
    double inner = 0.0;
    double len = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      inner += tangent[i * k + r] * v.column(i)[r];
      len += tangent[i * k + r] * tangent[i * k + r];
    }
    if (std::abs(inner) > 1e-10 * (1.0 + std::sqrt(len)))
      throw std::invalid_argument("tangent column " + std::to_string(i) + " is not orthogonal to v_i");
  }
  const double h = budget.fd_step;
  const auto plus = retract(v.data(), tangent, h, k);
  const auto minus = retract(v.data(), tangent, -h, k);
  return (dense_objective(c, plus, k) - dense_objective(c, minus, k)) / (2.0 * h);
}

std::vector<double> to_dense(const CostMatrix& c) {
  const std::size_t n = c.size();
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = c.row_columns(i);
    const auto weights = c.row_weights(i);
    for (std::size_t e = 0; e < cols.size(); ++e) dense[i * n + cols[e]] = weights[e];
  }
  return dense;
}

double dense_smallest_eigenvalue(std::span<const double> a, std::size_t n, const OracleBudget& budget) {
  if (n > budget.dense_n_cap) throw std::invalid_argument("dense eigenvalue limited to n <= " + std::to_string(budget.dense_n_cap));
  if (n == 0 || a.size() != n * n) throw std::invalid_argument("matrix data does not match n x n");
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<int> zero_forcing_detect(const MimoInstance& inst) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> h(
      inst.h.data(), static_cast<Eigen::Index>(inst.m), static_cast<Eigen::Index>(inst.n));
  const Eigen::Map<const Eigen::VectorXd> y(inst.y.data(), static_cast<Eigen::Index>(inst.m));
  const Eigen::VectorXd estimate = Eigen::MatrixXd(h).completeOrthogonalDecomposition().solve(y);
  std::vector<int> x(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) x[i] = estimate[static_cast<Eigen::Index>(i)] < 0.0 ? -1 : 1;
  return x;
}

std::vector<CheckOutcome> run_invariant_suite(std::size_t n, std::size_t seeds) {
  CheckOutcome monotone{"monotone descent"};
  CheckOutcome w_bounds{"w in [1, 1+2beta]"};
  CheckOutcome gap{"descent lemma gap"};
  CheckOutcome recursion{"recursion identity"};
  CheckOutcome incremental{"incremental gradients"};

  auto tally = [](CheckOutcome& o, bool ok) { ++(ok ? o.passed : o.failed); };

  for (std::size_t s = 0; s < seeds; ++s) {
    const auto raw = random_gaussian(n, 0.3, s);
    const auto c = CostMatrix::from_triplets(raw.n, raw.triplets);
    for (double beta : {0.0, 0.4, 0.8}) {
      SolverConfig config;
      config.beta = beta;
      config.seed = s;
      config.epsilon = 1e-10;
      config.max_sweeps = 300;
      config.trace_level = TraceLevel::PerSweepWithChecks;
      const auto result = solve(c, 0.0, config);

      bool mono = true;
      bool wb = true;
      bool gp = true;
      bool rec = true;
      double prev = 0.0;
      for (std::size_t t = 0; t < result.trace.sweeps.size(); ++t) {
        const auto& r = result.trace.sweeps[t];
        const double scale = 1e-8 * (1.0 + std::abs(r.f));
        if (t > 0 && r.f - prev > scale) mono = false;
        if (r.min_w < 1.0 - 1e-12 || r.max_w > 1.0 + 2.0 * beta + 1e-12) wb = false;
        if (r.descent_slack < -scale) gp = false;
        if (r.recursion_residual > 1e-10) rec = false;
        prev = r.f;
      }
      tally(monotone, mono);
      tally(w_bounds, wb);
      tally(gap, gp);
      tally(recursion, rec);
    }

    // Random unit replacements, then compare the maintained gradients with a rebuild.
    const std::size_t k = default_rank(n);
    auto v = FactorMatrix::random(k, n, s + 1000);
    auto g = rebuild_gradients(c, v);
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t u = 0; u < 1000; ++u) {
      const auto i = pick(rng);
      const auto fresh = FactorMatrix::random(k, 1, rng());
      const std::vector<double> old(v.column(i).begin(), v.column(i).end());
      v.set_column(i, fresh.column(0));
      apply_column_update(g, c, i, old, v.column(i));
    }
    const auto rebuilt = rebuild_gradients(c, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < k; ++r) worst = std::max(worst, std::abs(g.gradient(i)[r] - rebuilt.gradient(i)[r]));
    tally(incremental, worst <= 1e-7 * (1.0 + c.infinity_norm()));
  }
  return {monotone, w_bounds, gap, recursion, incremental};
}

}  // namespace mixsdp::validation
