#include "mixsdp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mixsdp/random.hpp"

namespace mixsdp {

void SolverConfig::validate() const {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must satisfy 0 <= beta < 1, got " + std::to_string(beta));
  if (const auto* warm = std::get_if<ExponentialWarmup>(&schedule); warm && !(warm->alpha >= 0.0))
    throw std::invalid_argument("warm-up alpha must be nonnegative");
  if (rank && *rank == 0) throw std::invalid_argument("rank must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (rebuild_period == 0) throw std::invalid_argument("rebuild period must be positive");
}

std::string_view to_string(CoordinateRule rule) {
  switch (rule) {
    case CoordinateRule::Cyclic: return "cyclic";
    case CoordinateRule::Uniform: return "uniform";
    case CoordinateRule::Importance: return "importance";
    case CoordinateRule::Greedy: return "greedy";
  }
  return "?";
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Mixing: return "mixing";
    case Algorithm::MixingPlusPlus: return "mixing++";
    case Algorithm::Bcm: return "bcm++";
  }
  return "?";
}

std::optional<CoordinateRule> parse_rule(std::string_view name) {
  for (auto rule : {CoordinateRule::Cyclic, CoordinateRule::Uniform, CoordinateRule::Importance,
                    CoordinateRule::Greedy})
    if (to_string(rule) == name) return rule;
  return std::nullopt;
}

std::optional<std::vector<double>> update_column_plain(std::span<const double> g) {
  const double y = norm2(g);
  if (y == 0.0) return std::nullopt;
  std::vector<double> u(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) u[r] = -g[r] / y;
  return u;
}

std::optional<MomentumStep> update_column_momentum(std::span<const double> g, std::span<const double> v,
                                                   double beta) {
  auto u = update_column_plain(g);
  if (!u) return std::nullopt;
  if (beta == 0.0) {
    auto column = *u;
    return MomentumStep{std::move(*u), std::move(column), 1.0};
  }
  std::vector<double> column(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) column[r] = (1.0 + beta) * (*u)[r] - beta * v[r];
  const double w = norm2(column);
  for (auto& x : column) x /= w;
  return MomentumStep{std::move(*u), std::move(column), w};
}

double momentum_at(const MomentumSchedule& schedule, double beta, std::size_t t) {
  if (const auto* warm = std::get_if<ExponentialWarmup>(&schedule)) {
    if (warm->total_sweeps == 0) return beta;
    const double ratio = static_cast<double>(t) / static_cast<double>(warm->total_sweeps);
    return std::clamp(beta * (1.0 - std::exp(-warm->alpha * ratio)), 0.0, beta);
  }
  return beta;
}

CoordinateSelector::CoordinateSelector(CoordinateRule rule, std::uint64_t seed) : rule_(rule), rng_(seed) {}

void CoordinateSelector::reset(const GradientArray& g) {
  if (rule_ != CoordinateRule::Importance) return;
  const std::size_t n = g.size();
  weight_.assign(g.norms().begin(), g.norms().end());
  tree_.assign(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    tree_[i] += weight_[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n) tree_[parent] += tree_[i];
  }
  total_ = 0.0;
  for (double y : weight_) total_ += y;
}

void CoordinateSelector::notify(std::size_t j, double y) {
  if (rule_ != CoordinateRule::Importance) return;
  const double delta = y - weight_[j];
  weight_[j] = y;
  total_ += delta;
  for (std::size_t i = j + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

std::size_t CoordinateSelector::sample_importance() {
  const std::size_t n = weight_.size();
  if (!(total_ > 0.0)) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  double target = std::uniform_real_distribution<double>(0.0, total_)(rng_);
  // Largest position whose prefix sum stays <= target; the sampled index is
  // the next one, so zero-weight entries are never chosen.
  std::size_t pos = 0;
  std::size_t step = 1;
  while (step * 2 <= n) step *= 2;
  for (; step > 0; step /= 2) {
    if (pos + step <= n && tree_[pos + step] <= target) {
      pos += step;
      target -= tree_[pos];
    }
  }
  // Accumulated drift can push the walk past the last positive weight.
  while (pos >= n || weight_[pos] <= 0.0) {
    if (pos == 0) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    pos = std::min(pos, n) - 1;
  }
  return pos;
}

std::size_t CoordinateSelector::select(const GradientArray& g, const FactorMatrix& v, std::size_t sweep_position) {
  const std::size_t n = g.size();
  switch (rule_) {
    case CoordinateRule::Cyclic:
      return sweep_position % n;
    case CoordinateRule::Uniform:
      return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    case CoordinateRule::Importance:
      return sample_importance();
    case CoordinateRule::Greedy: {
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double score = g.norm(i) + dot(v.column(i), g.gradient(i));
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      return best;
    }
  }
  return 0;
}

SweepStats sweep(const CostMatrix& c, FactorMatrix& v, GradientArray& g, const SolverConfig& config,
                 std::size_t sweep_index, CoordinateSelector& selector, const SolveHooks& hooks) {
  const std::size_t n = v.size();
  const std::size_t k = v.rank();
  const bool plain = config.algorithm == Algorithm::Mixing;
  const bool selected = config.algorithm == Algorithm::Bcm;
  const bool checks = config.trace_level == TraceLevel::PerSweepWithChecks;
  const double beta = plain ? 0.0 : momentum_at(config.schedule, config.beta, sweep_index);

  SweepStats stats;
  stats.min_gradient_norm = std::numeric_limits<double>::infinity();
  stats.min_combined_norm = std::numeric_limits<double>::infinity();
  if (selected) selector.reset(g);

  std::vector<double> old(k);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = selected ? selector.select(g, v, step) : step;
    const auto gi = g.gradient(i);
    const double y = g.norm(i);
    stats.min_gradient_norm = std::min(stats.min_gradient_norm, y);
    std::copy(v.column(i).begin(), v.column(i).end(), old.begin());

    std::vector<double> next;
    double w = 1.0;
    if (plain) {
      if (auto u = update_column_plain(gi)) next = std::move(*u);
    } else if (auto s = update_column_momentum(gi, old, beta)) {
      next = std::move(s->column);
      w = s->combined_norm;
    }

    if (next.empty()) {
      ++stats.degenerate_skips;
      if (hooks.on_update) hooks.on_update({sweep_index, i, gi, y, old, old, 1.0, beta, true});
      continue;
    }
    ++stats.updates;

    double moved = 0.0;
    for (std::size_t r = 0; r < k; ++r) moved += (old[r] - next[r]) * (old[r] - next[r]);
    stats.descent_accumulated += y * moved;

    if (checks) {
      stats.min_combined_norm = std::min(stats.min_combined_norm, w);
      stats.max_combined_norm = std::max(stats.max_combined_norm, w);
      double residual = 0.0;
      for (std::size_t r = 0; r < k; ++r)
        residual = std::max(residual, std::abs(w * y * next[r] + (1.0 + beta) * gi[r] + beta * y * old[r]));
      stats.max_recursion_residual = std::max(stats.max_recursion_residual, residual / (1.0 + y));
    }

    v.set_column(i, next);
    if (hooks.on_update) hooks.on_update({sweep_index, i, gi, y, old, v.column(i), w, beta, false});
    apply_column_update(g, c, i, old, next);
    if (selected && selector.rule() == CoordinateRule::Importance)
      for (std::size_t j : c.row_columns(i)) selector.notify(j, g.norm(j));
  }
  if (stats.updates == 0) stats.min_combined_norm = 1.0;
  return stats;
}

double lemma1_gap(double f_before, double f_after, double accumulated, double beta) {
  return (f_before - f_after) - (1.0 - beta) / (1.0 + beta) * accumulated;
}

double projected_grad_norm(const GradientArray& g, const FactorMatrix& v) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto gi = g.gradient(i);
    const auto vi = v.column(i);
    const double radial = dot(vi, gi);
    for (std::size_t r = 0; r < vi.size(); ++r) {
      const double t = 2.0 * (gi[r] - radial * vi[r]);
      total += t * t;
    }
  }
  return std::sqrt(total);
}

double dual_bound(const GradientArray& g) {
  double sum = 0.0;
  for (double y : g.norms()) sum += y;
  return -sum;
}

SolveResult solve(const CostMatrix& c, double offset, const SolverConfig& config, const SolveHooks& hooks) {
  config.validate();
  const std::size_t n = c.size();
  auto start = FactorMatrix::random(config.resolved_rank(n), n, derive_seed(config.seed, streams::kInit));
  return solve(c, offset, config, std::move(start), hooks);
}

SolveResult solve(const CostMatrix& c, double offset, const SolverConfig& config_in, FactorMatrix start,
                  const SolveHooks& hooks) {
  config_in.validate();
  if (start.size() != c.size()) throw std::invalid_argument("start point has the wrong number of columns");

  SolverConfig config = config_in;
  if (auto* warm = std::get_if<ExponentialWarmup>(&config.schedule); warm && warm->total_sweeps == 0)
    warm->total_sweeps = config.max_sweeps;

  const auto clock_start = std::chrono::steady_clock::now();
  FactorMatrix v = std::move(start);
  GradientArray g = rebuild_gradients(c, v);
  CoordinateSelector selector(config.rule, derive_seed(config.seed, streams::kSelector));

  SolveTrace trace;
  double f = objective(v, g);
  std::size_t hits = 0;
  std::size_t used = 0;
  bool converged = false;

  for (std::size_t s = 0; s < config.max_sweeps; ++s) {
    const double f_before = f;
    const auto stats = sweep(c, v, g, config, s, selector, hooks);
    if ((s + 1) % config.rebuild_period == 0) g = rebuild_gradients(c, v);
    f = objective(v, g);
    used = s + 1;

    if (config.trace_level != TraceLevel::Off) {
      const double beta_used =
          config.algorithm == Algorithm::Mixing ? 0.0 : momentum_at(config.schedule, config.beta, s);
      SweepRecord rec;
      rec.sweep = s;
      rec.f = f;
      rec.min_g_norm = stats.min_gradient_norm;
      rec.descent_slack = lemma1_gap(f_before, f, stats.descent_accumulated, beta_used);
      rec.grad_norm = projected_grad_norm(g, v);
      rec.beta_used = beta_used;
      rec.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
      rec.degenerate_skips = stats.degenerate_skips;
      if (config.trace_level == TraceLevel::PerSweepWithChecks) {
        rec.min_w = stats.min_combined_norm;
        rec.max_w = stats.max_combined_norm;
        rec.recursion_residual = stats.max_recursion_residual;
        if (f - f_before > 1e-8 * (1.0 + std::abs(f_before))) ++trace.monotonicity_violations;
      }
      trace.sweeps.push_back(rec);
    }

    if (std::abs(f_before - f) <= config.epsilon * std::max(1.0, std::abs(f))) {
      if (++hits >= 2) {
        converged = true;
        break;
      }
    } else {
      hits = 0;
    }
  }

  const double final_objective = objective(c, v);
  return SolveResult{std::move(v), final_objective, offset, used, converged, std::move(trace)};
}

}  // namespace mixsdp
