#include "mixsdp/factor_state.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "mixsdp/cost_matrix.hpp"

namespace mixsdp {

FactorMatrix::FactorMatrix(std::size_t rank, std::size_t n) : k_(rank), n_(n) {
  if (rank == 0 || n == 0) throw std::invalid_argument("factor matrix needs rank >= 1 and n >= 1");
  data_.assign(k_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) data_[i * k_] = 1.0;
}

FactorMatrix FactorMatrix::random(std::size_t rank, std::size_t n, std::uint64_t seed) {
  FactorMatrix v(rank, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> col(rank);
  for (std::size_t i = 0; i < n; ++i) {
    // A Gaussian draw is zero with probability zero; redraw to stay total.
    std::optional<std::vector<double>> unit;
    while (!unit) {
      for (auto& x : col) x = gauss(rng);
      unit = normalize(col);
    }
    v.set_column(i, *unit);
  }
  return v;
}

FactorMatrix FactorMatrix::from_columns(std::size_t rank, std::size_t n, std::vector<double> data) {
  FactorMatrix v(rank, n);
  if (data.size() != rank * n) throw std::invalid_argument("factor data size does not match rank * n");
  for (std::size_t i = 0; i < n; ++i) {
    auto unit = normalize(std::span<const double>(data.data() + i * rank, rank));
    if (!unit) throw std::invalid_argument("factor column " + std::to_string(i) + " is zero");
    v.set_column(i, *unit);
  }
  return v;
}

void FactorMatrix::set_column(std::size_t i, std::span<const double> value) {
  std::copy(value.begin(), value.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * k_));
}

GradientArray::GradientArray(std::size_t rank, std::size_t n)
    : k_(rank), n_(n), g_(rank * n, 0.0), y_(n, 0.0) {}

void GradientArray::refresh_norm(std::size_t i) { y_[i] = norm2(gradient(i)); }

std::size_t default_rank(std::size_t n) {
  auto k = static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(n)));
  while (k * k < 2 * n) ++k;
  while (k > 1 && (k - 1) * (k - 1) >= 2 * n) --k;
  return k;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) s += a[r] * b[r];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::optional<std::vector<double>> normalize(std::span<const double> v) {
  const double len = norm2(v);
  if (len == 0.0) return std::nullopt;
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x /= len;
  return out;
}

double objective(const CostMatrix& c, const FactorMatrix& v) {
  std::vector<double> g(v.rank());
  double f = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    row_gather(c, i, v, g);
    f += dot(v.column(i), g);
  }
  return f;
}

double objective(const FactorMatrix& v, const GradientArray& g) {
  double f = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) f += dot(v.column(i), g.gradient(i));
  return f;
}

GradientArray rebuild_gradients(const CostMatrix& c, const FactorMatrix& v) {
  GradientArray g(v.rank(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    row_gather(c, i, v, g.gradient(i));
    g.refresh_norm(i);
  }
  return g;
}

void apply_column_update(GradientArray& g, const CostMatrix& c, std::size_t i,
                         std::span<const double> v_old, std::span<const double> v_new) {
  const std::size_t k = v_old.size();
  const auto cols = c.row_columns(i);
  const auto weights = c.row_weights(i);
  for (std::size_t e = 0; e < cols.size(); ++e) {
    auto gj = g.gradient(cols[e]);
    const double w = weights[e];
    for (std::size_t r = 0; r < k; ++r) gj[r] += w * (v_new[r] - v_old[r]);
    g.refresh_norm(cols[e]);
  }
}

}  // namespace mixsdp
