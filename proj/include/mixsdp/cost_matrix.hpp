#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mixsdp {

class FactorMatrix;

/// Directed (row, column, weight) entry used to assemble a cost matrix.
struct Triplet {
  std::size_t row;
  std::size_t col;
  double weight;
};

/**
 * Sparse symmetric cost matrix with an implicit zero diagonal.
 *
 * Stored as compressed rows with strictly increasing column indices. The
 * diagonal is never stored: under unit-norm columns it only contributes a
 * constant to the objective, which problem builders carry as an offset.
 * Immutable after construction.
 */
class CostMatrix {
 public:
  /// Sums duplicate directed entries, symmetrizes as (A + A^T) / 2 and drops
  /// the diagonal. Throws std::invalid_argument on n == 0, out-of-range
  /// indices or non-finite weights.
  static CostMatrix from_triplets(std::size_t n, std::span<const Triplet> triplets);

  /// All-zero n x n matrix.
  static CostMatrix zero(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return cols_.size(); }

  std::span<const std::size_t> row_columns(std::size_t i) const {
    return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row_weights(std::size_t i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Stored weight at (i, j), zero when absent.
  double entry(std::size_t i, std::size_t j) const;

  /// Sum over all ordered pairs of c_ij.
  double total_weight() const;

  /// Max absolute row sum.
  double infinity_norm() const;

 private:
  CostMatrix() = default;

  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> weights_;
};

/// out = sum_{j != i} c_ij * v_j over the sparse row, with V's current columns.
void row_gather(const CostMatrix& c, std::size_t i, const FactorMatrix& v, std::span<double> out);
std::vector<double> row_gather(const CostMatrix& c, std::size_t i, const FactorMatrix& v);

}  // namespace mixsdp
