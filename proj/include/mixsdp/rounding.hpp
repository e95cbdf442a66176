#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mixsdp/factor_state.hpp"
#include "mixsdp/problems.hpp"

namespace mixsdp {

struct RoundingReport {
  double best_value = 0.0;
  std::vector<int> assignment;
  std::size_t trials = 0;
  std::vector<double> per_trial_values;
};

/// sign with sign(0) = +1.
inline int sign_of(double x) { return x < 0.0 ? -1 : 1; }

/// Hyperplane rounding: x_i = sign(<r, v_i>) with Gaussian r, best cut kept.
/// Trial t draws r from a stream derived from (seed, t), so a larger trial
/// count only appends trials.
RoundingReport round_maxcut(const FactorMatrix& v, const MaxCutInstance& inst, std::size_t trials, std::uint64_t seed);

/// Trial 0 decodes against the truth column; later trials use
/// x_i = sign(<r, v_i> <r, v_truth>). Best satisfied-clause count kept.
RoundingReport round_maxsat(const FactorMatrix& v, const MaxSatInstance& inst, std::size_t trials, std::uint64_t seed);

struct MimoDetection {
  std::vector<int> x;
  double residual;
};

/// x_i = sign(<v_i, v_n>) against the truth column n.
MimoDetection detect_mimo(const FactorMatrix& v, const MimoInstance& inst);

}  // namespace mixsdp
