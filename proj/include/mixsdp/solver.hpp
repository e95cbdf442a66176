#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mixsdp/cost_matrix.hpp"
#include "mixsdp/factor_state.hpp"

namespace mixsdp {

/// Which update kernel a solve runs.
enum class Algorithm {
  Mixing,          ///< cyclic, v_i <- normalize(-g_i); beta is ignored
  MixingPlusPlus,  ///< cyclic with the heavy-ball double normalization
  Bcm,             ///< momentum update on coordinates picked by a CoordinateRule
};

enum class CoordinateRule { Cyclic, Uniform, Importance, Greedy };

enum class TraceLevel { Off, PerSweep, PerSweepWithChecks };

struct FixedMomentum {};

/// beta_t = beta * (1 - exp(-alpha * t / T)), t counted in sweeps.
/// total_sweeps == 0 means T = max_sweeps of the enclosing config.
struct ExponentialWarmup {
  double alpha = 10.0;
  std::size_t total_sweeps = 0;
};

using MomentumSchedule = std::variant<FixedMomentum, ExponentialWarmup>;

struct SolverConfig {
  Algorithm algorithm = Algorithm::Bcm;
  double beta = 0.8;
  MomentumSchedule schedule = FixedMomentum{};
  CoordinateRule rule = CoordinateRule::Cyclic;
  std::optional<std::size_t> rank;  ///< nullopt selects default_rank(n)
  double epsilon = 1e-5;
  std::size_t max_sweeps = 10000;
  std::uint64_t seed = 0;
  std::size_t rebuild_period = 64;
  TraceLevel trace_level = TraceLevel::PerSweep;

  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
  std::size_t resolved_rank(std::size_t n) const { return rank ? *rank : default_rank(n); }
};

std::string_view to_string(CoordinateRule rule);
std::string_view to_string(Algorithm algorithm);
std::optional<CoordinateRule> parse_rule(std::string_view name);

/// One column step of the momentum kernel.
struct MomentumStep {
  std::vector<double> direction;  ///< u_i = -g_i / ||g_i||
  std::vector<double> column;     ///< the new v_i
  double combined_norm;           ///< w_i = ||(1 + beta) u_i - beta v_i||
};

/// -g / ||g||, or nullopt when g == 0 (the column is then kept).
std::optional<std::vector<double>> update_column_plain(std::span<const double> g);

/// u = -g/||g||, v_new = ((1+beta) u - beta v) / w. With beta == 0 the second
/// normalization is skipped so the result equals update_column_plain bitwise.
std::optional<MomentumStep> update_column_momentum(std::span<const double> g, std::span<const double> v,
                                                   double beta);

double momentum_at(const MomentumSchedule& schedule, double beta, std::size_t t);

/// Draws coordinates for BCM sweeps. Importance sampling keeps a Fenwick tree
/// over y_i that the sweep refreshes after every update.
class CoordinateSelector {
 public:
  CoordinateSelector(CoordinateRule rule, std::uint64_t seed);

  CoordinateRule rule() const { return rule_; }

  /// Called at the start of each sweep with the current gradients.
  void reset(const GradientArray& g);
  /// Tells the selector that y_j changed.
  void notify(std::size_t j, double y);

  std::size_t select(const GradientArray& g, const FactorMatrix& v, std::size_t sweep_position);

 private:
  std::size_t sample_importance();

  CoordinateRule rule_;
  std::mt19937_64 rng_;
  std::vector<double> tree_;
  std::vector<double> weight_;
  double total_ = 0.0;
};

/// Everything the kernels saw during one column update; passed to SolveHooks.
struct UpdateEvent {
  std::size_t sweep;
  std::size_t index;
  std::span<const double> gradient;
  double gradient_norm;
  std::span<const double> old_column;
  std::span<const double> new_column;
  double combined_norm;  ///< w_i, 1 for plain updates
  double beta;
  bool degenerate;
};

struct SolveHooks {
  std::function<void(const UpdateEvent&)> on_update;
};

struct SweepStats {
  double min_gradient_norm = 0.0;  ///< min y_i over updates in the sweep
  double descent_accumulated = 0.0;  ///< sum of y_i * ||v_i - v_hat_i||^2
  std::size_t updates = 0;
  std::size_t degenerate_skips = 0;
  // Filled only at TraceLevel::PerSweepWithChecks.
  double min_combined_norm = 0.0;
  double max_combined_norm = 0.0;
  double max_recursion_residual = 0.0;  ///< max |w y v_hat + (1+beta) g + beta y v| / (1 + y)
};

/// n coordinate updates against maintained gradients.
SweepStats sweep(const CostMatrix& c, FactorMatrix& v, GradientArray& g, const SolverConfig& config,
                 std::size_t sweep_index, CoordinateSelector& selector, const SolveHooks& hooks = {});

struct SweepRecord {
  std::size_t sweep = 0;
  double f = 0.0;
  double min_g_norm = 0.0;
  double descent_slack = 0.0;
  double grad_norm = 0.0;
  double beta_used = 0.0;
  double elapsed_s = 0.0;
  std::size_t degenerate_skips = 0;
  double min_w = 0.0;
  double max_w = 0.0;
  double recursion_residual = 0.0;
};

struct SolveTrace {
  std::vector<SweepRecord> sweeps;
  /// Sweeps where f rose by more than 1e-8 * (1 + |f|); counted at PerSweepWithChecks.
  std::size_t monotonicity_violations = 0;
};

struct SolveResult {
  FactorMatrix v;
  double objective;
  double offset;
  std::size_t sweeps_used;
  bool converged;
  SolveTrace trace;

  double problem_value() const { return offset + objective; }
};

/// Runs sweeps from a random start until the relative change of f stays
/// within epsilon for two consecutive sweeps or max_sweeps is reached.
SolveResult solve(const CostMatrix& c, double offset, const SolverConfig& config, const SolveHooks& hooks = {});

/// Same, from a caller-provided start.
SolveResult solve(const CostMatrix& c, double offset, const SolverConfig& config, FactorMatrix start,
                  const SolveHooks& hooks = {});

/// (f_before - f_after) - (1 - beta)/(1 + beta) * accumulated.
double lemma1_gap(double f_before, double f_after, double accumulated, double beta);

/// Frobenius norm of the Riemannian gradient 2(g_i - <v_i, g_i> v_i).
double projected_grad_norm(const GradientArray& g, const FactorMatrix& v);

/// -sum_i y_i. A lower bound on the optimum only when C + diag(y) is PSD.
double dual_bound(const GradientArray& g);

}  // namespace mixsdp
