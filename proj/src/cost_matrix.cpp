#include "mixsdp/cost_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mixsdp/factor_state.hpp"

namespace mixsdp {

namespace {

std::string describe(const Triplet& t) {
  return "(" + std::to_string(t.row) + ", " + std::to_string(t.col) + ", " + std::to_string(t.weight) + ")";
}

}  // namespace

CostMatrix CostMatrix::from_triplets(std::size_t n, std::span<const Triplet> triplets) {
  if (n == 0) throw std::invalid_argument("cost matrix dimension must be positive");

  // Each directed triplet contributes half its weight to the unordered pair,
  // which is (A + A^T) / 2 after summation. Summing once per pair keeps the
  // two mirrored cells bitwise equal.
  std::vector<Triplet> pairs;
  pairs.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (t.row >= n || t.col >= n)
      throw std::invalid_argument("triplet index out of range for n = " + std::to_string(n) + ": " + describe(t));
    if (!std::isfinite(t.weight)) throw std::invalid_argument("non-finite triplet weight: " + describe(t));
    if (t.row == t.col) continue;
    pairs.push_back({std::min(t.row, t.col), std::max(t.row, t.col), 0.5 * t.weight});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  std::vector<Triplet> upper;
  for (std::size_t pos = 0; pos < pairs.size();) {
    const auto row = pairs[pos].row;
    const auto col = pairs[pos].col;
    double sum = 0.0;
    for (; pos < pairs.size() && pairs[pos].row == row && pairs[pos].col == col; ++pos) sum += pairs[pos].weight;
    if (sum != 0.0) upper.push_back({row, col, sum});
  }

  CostMatrix m;
  m.n_ = n;
  m.offsets_.assign(n + 1, 0);
  for (const auto& t : upper) {
    ++m.offsets_[t.row + 1];
    ++m.offsets_[t.col + 1];
  }
  for (std::size_t i = 0; i < n; ++i) m.offsets_[i + 1] += m.offsets_[i];
  m.cols_.resize(2 * upper.size());
  m.weights_.resize(2 * upper.size());
  // Upper entries are sorted by (row, col). Filling lower-triangle cells
  // first in that order keeps every row sorted by column.
  std::vector<std::size_t> cursor(m.offsets_.begin(), m.offsets_.end() - 1);
  for (const auto& t : upper) {
    m.cols_[cursor[t.col]] = t.row;
    m.weights_[cursor[t.col]++] = t.weight;
  }
  for (const auto& t : upper) {
    m.cols_[cursor[t.row]] = t.col;
    m.weights_[cursor[t.row]++] = t.weight;
  }
  return m;
}

CostMatrix CostMatrix::zero(std::size_t n) { return from_triplets(n, {}); }

double CostMatrix::entry(std::size_t i, std::size_t j) const {
  const auto cols = row_columns(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return row_weights(i)[static_cast<std::size_t>(it - cols.begin())];
}

double CostMatrix::total_weight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

double CostMatrix::infinity_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (double w : row_weights(i)) row += std::abs(w);
    best = std::max(best, row);
  }
  return best;
}

void row_gather(const CostMatrix& c, std::size_t i, const FactorMatrix& v, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto cols = c.row_columns(i);
  const auto weights = c.row_weights(i);
  const std::size_t k = out.size();
  for (std::size_t e = 0; e < cols.size(); ++e) {
    const auto vj = v.column(cols[e]);
    const double w = weights[e];
    for (std::size_t r = 0; r < k; ++r) out[r] += w * vj[r];
  }
}

std::vector<double> row_gather(const CostMatrix& c, std::size_t i, const FactorMatrix& v) {
  std::vector<double> out(v.rank());
  row_gather(c, i, v, out);
  return out;
}

}  // namespace mixsdp
