#include "mixsdp/rounding.hpp"

#include <random>
#include <stdexcept>

#include "mixsdp/random.hpp"

namespace mixsdp {

namespace {

std::vector<double> gaussian_direction(std::size_t k, std::uint64_t seed, std::size_t trial) {
  std::mt19937_64 rng(derive_seed(derive_seed(seed, streams::kRounding), trial));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> r(k);
  for (auto& x : r) x = gauss(rng);
  return r;
}

// Strict improvement only, so ties keep the lowest trial index.
void record(RoundingReport& report, double value, std::vector<int>&& x) {
  report.per_trial_values.push_back(value);
  if (report.per_trial_values.size() == 1 || value > report.best_value) {
    report.best_value = value;
    report.assignment = std::move(x);
  }
}

}  // namespace

RoundingReport round_maxcut(const FactorMatrix& v, const MaxCutInstance& inst, std::size_t trials,
                            std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("rounding needs at least one trial");
  if (v.size() != inst.n) throw std::invalid_argument("factor column count does not match the graph");
  RoundingReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto r = gaussian_direction(v.rank(), seed, t);
    std::vector<int> x(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) x[i] = sign_of(dot(r, v.column(i)));
    const double value = cut_value(inst, x);
    record(report, value, std::move(x));
  }
  return report;
}

RoundingReport round_maxsat(const FactorMatrix& v, const MaxSatInstance& inst, std::size_t trials,
                            std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("rounding needs at least one trial");
  if (v.size() != inst.num_vars + 1) throw std::invalid_argument("factor needs num_vars + 1 columns");
  const std::size_t n = inst.num_vars;
  const auto truth = v.column(n);
  RoundingReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<int> x(n);
    if (t == 0) {
      for (std::size_t i = 0; i < n; ++i) x[i] = sign_of(dot(v.column(i), truth));
    } else {
      const auto r = gaussian_direction(v.rank(), seed, t);
      const double side = dot(r, truth);
      for (std::size_t i = 0; i < n; ++i) x[i] = sign_of(dot(r, v.column(i)) * side);
    }
    const double value = static_cast<double>(satisfied_clauses(inst, x));
    record(report, value, std::move(x));
  }
  return report;
}

MimoDetection detect_mimo(const FactorMatrix& v, const MimoInstance& inst) {
  if (v.size() != inst.n + 1) throw std::invalid_argument("factor needs n + 1 columns");
  const auto truth = v.column(inst.n);
  MimoDetection out;
  out.x.resize(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) out.x[i] = sign_of(dot(v.column(i), truth));
  out.residual = mimo_residual(inst, out.x);
  return out;
}

}  // namespace mixsdp
