#include "mixsdp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace mixsdp {

MaxCutInstance MaxCutInstance::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) continue;
    merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
  }
  MaxCutInstance inst;
  inst.n = n;
  inst.edges.reserve(merged.size());
  for (const auto& [key, w] : merged) inst.edges.push_back({key.first, key.second, w});
  return inst;
}

double MaxCutInstance::total_weight() const {
  double total = 0.0;
  for (const auto& e : edges) total += e.weight;
  return total;
}

Reduction maxcut_to_cost(const MaxCutInstance& inst) {
  std::vector<Triplet> triplets;
  triplets.reserve(2 * inst.edges.size());
  for (const auto& e : inst.edges) {
    triplets.push_back({e.u, e.v, e.weight});
    triplets.push_back({e.v, e.u, e.weight});
  }
  return {CostMatrix::from_triplets(inst.n, triplets), AffineMap{inst.total_weight() / 2.0, -0.25}};
}

namespace {

void check_clause(const MaxSatInstance& inst, const Clause& clause, std::size_t index) {
  if (clause.literals.empty()) throw std::invalid_argument("clause " + std::to_string(index) + " is empty");
  for (std::size_t a = 0; a < clause.literals.size(); ++a) {
    const auto& lit = clause.literals[a];
    if (lit.var >= inst.num_vars)
      throw std::invalid_argument("clause " + std::to_string(index) + " references variable out of range");
    if (lit.sign != 1 && lit.sign != -1)
      throw std::invalid_argument("clause " + std::to_string(index) + " has a literal sign other than +-1");
    if (clause.tautological) continue;
    for (std::size_t b = a + 1; b < clause.literals.size(); ++b)
      if (clause.literals[b].var == lit.var)
        throw std::invalid_argument("clause " + std::to_string(index) +
                                    " repeats a variable without being flagged tautological");
  }
}

}  // namespace

Reduction maxsat_to_cost(const MaxSatInstance& inst) {
  const std::size_t truth = inst.num_vars;
  std::vector<Triplet> triplets;
  double offset = 0.0;
  for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
    const auto& clause = inst.clauses[j];
    check_clause(inst, clause, j);
    offset += 1.0;
    if (clause.tautological) continue;

    std::vector<std::pair<std::size_t, double>> s;
    s.reserve(clause.literals.size() + 1);
    for (const auto& lit : clause.literals) s.emplace_back(lit.var, static_cast<double>(lit.sign));
    s.emplace_back(truth, -1.0);

    const double len = static_cast<double>(clause.literals.size());
    const double scale = 1.0 / (4.0 * len);
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = 0; b < s.size(); ++b)
        if (a != b) triplets.push_back({s[a].first, s[b].first, s[a].second * s[b].second * scale});
    // The |s_j| + 1 unit diagonal entries of s s^T are constants under the
    // unit-norm constraint and move into the offset.
    offset += ((len - 1.0) * (len - 1.0) - (len + 1.0)) * scale;
  }
  return {CostMatrix::from_triplets(inst.num_vars + 1, triplets), AffineMap{offset, -1.0}};
}

Reduction mimo_to_cost(const MimoInstance& inst) {
  const std::size_t m = inst.m;
  const std::size_t n = inst.n;
  if (m == 0 || n == 0 || inst.h.size() != m * n || inst.y.size() != m)
    throw std::invalid_argument("MIMO instance dimensions are inconsistent");

  std::vector<double> gram(n * n, 0.0);
  std::vector<double> hty(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t a = 0; a < n; ++a) {
      const double ha = inst.h_at(r, a);
      hty[a] += ha * inst.y[r];
      for (std::size_t b = 0; b < n; ++b) gram[a * n + b] += ha * inst.h_at(r, b);
    }
  double yty = 0.0;
  for (double v : inst.y) yty += v * v;

  std::vector<Triplet> triplets;
  triplets.reserve(n * (n + 1));
  double offset = yty;
  for (std::size_t a = 0; a < n; ++a) {
    offset += gram[a * n + a];
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) triplets.push_back({a, b, gram[a * n + b]});
    triplets.push_back({a, n, -hty[a]});
    triplets.push_back({n, a, -hty[a]});
  }
  return {CostMatrix::from_triplets(n + 1, triplets), AffineMap{offset, 1.0}};
}

Reduction to_cost(const ProblemInstance& inst) {
  struct Visitor {
    Reduction operator()(const MaxCutInstance& p) const { return maxcut_to_cost(p); }
    Reduction operator()(const MaxSatInstance& p) const { return maxsat_to_cost(p); }
    Reduction operator()(const MimoInstance& p) const { return mimo_to_cost(p); }
    Reduction operator()(const RawInstance& p) const {
      return {CostMatrix::from_triplets(p.n, p.triplets), AffineMap{}};
    }
  };
  return std::visit(Visitor{}, inst);
}

double cut_value(const MaxCutInstance& inst, std::span<const int> x) {
  double cut = 0.0;
  for (const auto& e : inst.edges)
    if (x[e.u] != x[e.v]) cut += e.weight;
  return cut;
}

std::size_t satisfied_clauses(const MaxSatInstance& inst, std::span<const int> x) {
  std::size_t count = 0;
  for (const auto& clause : inst.clauses) {
    const bool sat = std::any_of(clause.literals.begin(), clause.literals.end(),
                                 [&](const Literal& lit) { return lit.sign * x[lit.var] > 0; });
    if (sat) ++count;
  }
  return count;
}

double maxsat_bound_at(const MaxSatInstance& inst, std::span<const int> x) {
  double bound = 0.0;
  for (const auto& clause : inst.clauses) {
    if (clause.tautological) {
      bound += 1.0;
      continue;
    }
    const double len = static_cast<double>(clause.literals.size());
    double vs = -1.0;
    for (const auto& lit : clause.literals) vs += lit.sign * x[lit.var];
    bound += 1.0 - (vs * vs - (len - 1.0) * (len - 1.0)) / (4.0 * len);
  }
  return bound;
}

double mimo_residual(const MimoInstance& inst, std::span<const int> x) {
  double total = 0.0;
  for (std::size_t r = 0; r < inst.m; ++r) {
    double diff = inst.y[r];
    for (std::size_t c = 0; c < inst.n; ++c) diff -= inst.h_at(r, c) * x[c];
    total += diff * diff;
  }
  return total;
}

MimoSample simulate_mimo(std::size_t m, std::size_t n, double snr, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("MIMO dimensions must be positive");
  if (!(snr > 0.0)) throw std::invalid_argument("SNR must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  MimoSample out;
  auto& inst = out.instance;
  inst.m = m;
  inst.n = n;
  inst.snr = snr;
  inst.noise_variance = static_cast<double>(m) * static_cast<double>(n) / snr;
  inst.h.resize(m * n);
  for (auto& v : inst.h) v = gauss(rng);
  out.x_true.resize(n);
  for (auto& v : out.x_true) v = coin(rng) ? 1 : -1;
  const double sigma = std::sqrt(inst.noise_variance);
  inst.y.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    double signal = 0.0;
    for (std::size_t c = 0; c < n; ++c) signal += inst.h_at(r, c) * out.x_true[c];
    inst.y[r] = signal + sigma * gauss(rng);
  }
  return out;
}

MaxCutInstance erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p);
  MaxCutInstance inst;
  inst.n = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) inst.edges.push_back({i, j, 1.0});
  return inst;
}

RawInstance random_gaussian(std::size_t n, double p, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("matrix needs at least one row");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RawInstance inst;
  inst.n = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) {
        const double w = gauss(rng);
        inst.triplets.push_back({i, j, w});
        inst.triplets.push_back({j, i, w});
      }
  return inst;
}

MaxSatInstance random_ksat(std::size_t num_vars, std::size_t num_clauses, std::size_t width, std::uint64_t seed) {
  if (width == 0 || width > num_vars) throw std::invalid_argument("clause width must lie in [1, num_vars]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> vars(num_vars);
  MaxSatInstance inst;
  inst.num_vars = num_vars;
  for (std::size_t j = 0; j < num_clauses; ++j) {
    for (std::size_t i = 0; i < num_vars; ++i) vars[i] = i;
    Clause clause;
    // Partial Fisher-Yates: the first `width` slots are a uniform subset.
    for (std::size_t a = 0; a < width; ++a) {
      const auto b = std::uniform_int_distribution<std::size_t>(a, num_vars - 1)(rng);
      std::swap(vars[a], vars[b]);
      clause.literals.push_back({vars[a], coin(rng) ? 1 : -1});
    }
    inst.clauses.push_back(std::move(clause));
  }
  return inst;
}

}  // namespace mixsdp
