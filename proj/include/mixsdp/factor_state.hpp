#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mixsdp {

class CostMatrix;

/**
 * Dense k x n iterate with unit-norm columns, stored column-contiguous so
 * every per-column kernel is a unit-stride loop over k values.
 */
class FactorMatrix {
 public:
  /// Columns start as copies of e_1. Throws std::invalid_argument when k or n is zero.
  FactorMatrix(std::size_t rank, std::size_t n);

  /// Independent standard-Gaussian columns, normalized. Deterministic per seed.
  static FactorMatrix random(std::size_t rank, std::size_t n, std::uint64_t seed);

  /// Builds from raw column-major data; every column is normalized and must be nonzero.
  static FactorMatrix from_columns(std::size_t rank, std::size_t n, std::vector<double> data);

  std::size_t rank() const { return k_; }
  std::size_t size() const { return n_; }

  std::span<const double> column(std::size_t i) const { return {data_.data() + i * k_, k_}; }

  /// Overwrites column i. The caller guarantees a unit vector.
  void set_column(std::size_t i, std::span<const double> value);

  std::span<const double> data() const { return data_; }

  bool operator==(const FactorMatrix&) const = default;

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<double> data_;
};

/// Maintained g_i = sum_{j != i} c_ij v_j together with y_i = ||g_i||.
class GradientArray {
 public:
  GradientArray(std::size_t rank, std::size_t n);

  std::size_t rank() const { return k_; }
  std::size_t size() const { return n_; }

  std::span<const double> gradient(std::size_t i) const { return {g_.data() + i * k_, k_}; }
  std::span<double> gradient(std::size_t i) { return {g_.data() + i * k_, k_}; }
  double norm(std::size_t i) const { return y_[i]; }
  std::span<const double> norms() const { return y_; }

  void refresh_norm(std::size_t i);

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<double> g_;
  std::vector<double> y_;
};

/// Smallest k with k^2 >= 2n, i.e. ceil(sqrt(2n)) computed in integers.
std::size_t default_rank(std::size_t n);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// v / ||v||, or nullopt when ||v|| == 0 (the degenerate direction).
std::optional<std::vector<double>> normalize(std::span<const double> v);

/// f(V) = <C, V^T V> over the off-diagonal entries of C.
double objective(const CostMatrix& c, const FactorMatrix& v);

/// f(V) = sum_i <v_i, g_i>, valid when G is consistent with V.
double objective(const FactorMatrix& v, const GradientArray& g);

GradientArray rebuild_gradients(const CostMatrix& c, const FactorMatrix& v);

/// Propagates column i moving from v_old to v_new into every neighbour's
/// gradient. g_i itself is left untouched.
void apply_column_update(GradientArray& g, const CostMatrix& c, std::size_t i,
                         std::span<const double> v_old, std::span<const double> v_new);

}  // namespace mixsdp
