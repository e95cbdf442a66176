#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mixsdp/cost_matrix.hpp"

namespace mixsdp {

/// value = offset + scale * f, where f = <C, V^T V> is the solver objective.
struct AffineMap {
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double f) const { return offset + scale * f; }
};

struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

/// Weighted undirected graph with u < v on every edge, no self-loops and no
/// repeated pairs.
struct MaxCutInstance {
  std::size_t n = 0;
  std::vector<Edge> edges;

  /// Orients edges, drops self-loops and sums parallel edges.
  static MaxCutInstance from_edges(std::size_t n, std::span<const Edge> edges);

  double total_weight() const;
};

struct Literal {
  std::size_t var;
  int sign;  ///< +1 for x, -1 for not x
};

/// A clause holds distinct literals. A variable appears with both signs only
/// when the clause is flagged tautological.
struct Clause {
  std::vector<Literal> literals;
  bool tautological = false;
};

struct MaxSatInstance {
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;
};

/// y = H x + noise. H is row-major m x n.
struct MimoInstance {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> h;
  std::vector<double> y;
  double snr = 0.0;
  double noise_variance = 0.0;

  double h_at(std::size_t row, std::size_t col) const { return h[row * n + col]; }
};

struct RawInstance {
  std::size_t n = 0;
  std::vector<Triplet> triplets;
};

using ProblemInstance = std::variant<MaxCutInstance, MaxSatInstance, MimoInstance, RawInstance>;

struct Reduction {
  CostMatrix cost;
  /// Maps solver f to the application metric: cut weight, clause bound or
  /// squared residual.
  AffineMap value;
};

/// Cut value = W/2 - f/4 where W is the total edge weight.
Reduction maxcut_to_cost(const MaxCutInstance& inst);

/// Variables take columns 0..n-1 and the truth direction takes column n.
/// Each non-tautological clause contributes s s^T / (4|s|) where s carries
/// the literal signs and -1 at the truth column; the map returns
/// sum_j 1 - (||V s_j||^2 - (|s_j| - 1)^2) / (4|s_j|), counting tautologies as 1.
Reduction maxsat_to_cost(const MaxSatInstance& inst);

/// [[H^T H, -H^T y], [-y^T H, y^T y]] over n + 1 columns, truth column last.
/// The map returns ||y - H x||^2 at embeddings z = [x; 1].
Reduction mimo_to_cost(const MimoInstance& inst);

/// The ProblemInstance-level dispatch. Raw instances get the identity map.
Reduction to_cost(const ProblemInstance& inst);

double cut_value(const MaxCutInstance& inst, std::span<const int> x);
std::size_t satisfied_clauses(const MaxSatInstance& inst, std::span<const int> x);
double mimo_residual(const MimoInstance& inst, std::span<const int> x);

/// Clause relaxation bound at a +-1 assignment (truth = +1), evaluated
/// directly from the clause formula without any cost matrix.
double maxsat_bound_at(const MaxSatInstance& inst, std::span<const int> x);

struct MimoSample {
  MimoInstance instance;
  std::vector<int> x_true;
};

/// H ~ N(0,1), x uniform on {+-1}^n, noise ~ N(0, m n / snr).
MimoSample simulate_mimo(std::size_t m, std::size_t n, double snr, std::uint64_t seed);

/// G(n, p) with unit weights.
MaxCutInstance erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Each unordered pair present with probability p, weight ~ N(0, 1).
RawInstance random_gaussian(std::size_t n, double p, std::uint64_t seed);

/// Uniform random width-w clauses over distinct variables.
MaxSatInstance random_ksat(std::size_t num_vars, std::size_t num_clauses, std::size_t width, std::uint64_t seed);

}  // namespace mixsdp
