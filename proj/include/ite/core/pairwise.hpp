#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ite/core/parallel.hpp"
#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"

namespace ite {

/// Gaussian-kernel width: either fixed or the median pairwise distance.
class Bandwidth {
 public:
  static Bandwidth median() { return Bandwidth(0.0, true); }
  static Bandwidth fixed(double sigma) {
    ite::detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::BandwidthNonPositive,
                    "bandwidth must be positive, got " + std::to_string(sigma));
    return Bandwidth(sigma, false);
  }
  bool is_median() const noexcept { return median_; }
  double value() const noexcept { return sigma_; }

 private:
  Bandwidth(double sigma, bool median) : sigma_(sigma), median_(median) {}
  double sigma_;
  bool median_;
};

/// Pooled samples above this size are subsampled for the median heuristic.
inline constexpr Index kMedianHeuristicMaxPoints = 2000;

namespace detail {

/// Lexicographic order on (n, d, row-major data). Symmetric two-sample
/// statistics evaluate their cross terms with the smaller sample first so that
/// swapping the arguments reproduces the same floating-point result.
inline bool canonical_first(const Sample& x, const Sample& y) {
  if (x.n() != y.n()) return x.n() < y.n();
  if (x.d() != y.d()) return x.d() < y.d();
  const double* a = x.data().data();
  const double* b = y.data().data();
  return !std::lexicographical_compare(b, b + y.data().size(), a, a + x.data().size());
}

/// `count` distinct indices from [0, n), in draw order.
inline std::vector<Index> draw_without_replacement(Index n, Index count, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(seed);
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

inline RowMatrix take_rows(const RowMatrix& m, const std::vector<Index>& rows) {
  RowMatrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

/// Sum over rows of a per-row partial sum; rows are evaluated in parallel and
/// reduced in index order, so the result does not depend on the thread count.
template <typename RowFn>
double ordered_row_sum(Index rows, RowFn&& row_fn) {
  std::vector<double> partial(static_cast<std::size_t>(rows));
  parallel_for(0, static_cast<std::size_t>(rows),
               [&](std::size_t i) { partial[i] = row_fn(static_cast<Index>(i)); }, 16);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace detail

/// Median of the pairwise Euclidean distances of `pooled`, subsampled (seeded,
/// without replacement) to kMedianHeuristicMaxPoints rows when larger.
inline double median_pairwise_distance(const Sample& pooled, std::uint64_t seed) {
  RowMatrix pts = pooled.data();
  if (pts.rows() > kMedianHeuristicMaxPoints) {
    pts = detail::take_rows(pts, detail::draw_without_replacement(
                                     pts.rows(), kMedianHeuristicMaxPoints, seed));
  }
  const Index n = pts.rows();
  ite::detail::require(n >= 2, ErrorCode::BandwidthNonPositive,
                  "median heuristic needs at least 2 points");
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      sq.push_back(squared_distance(pts.data() + i * pts.cols(), pts.data() + j * pts.cols(),
                                    pts.cols()));
  const std::size_t mid = sq.size() / 2;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
  double median = std::sqrt(sq[mid]);
  if (sq.size() % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + std::sqrt(lower));
  }
  ite::detail::require(median > 0.0, ErrorCode::BandwidthNonPositive,
                  "median pairwise distance is zero");
  return median;
}

/// Sum of exp(-|a_i - b_j|^2 / (2 sigma^2)) over all pairs (i, j), optionally
/// skipping i == j (only meaningful when a and b are the same sample).
inline double gaussian_kernel_sum(const Sample& a, const Sample& b, double sigma,
                                  bool skip_diagonal = false) {
  require_same_dim(a, b);
  const double scale = -0.5 / (sigma * sigma);
  const Index d = a.d();
  return detail::ordered_row_sum(a.n(), [&](Index i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (Index j = 0; j < b.n(); ++j) {
      if (skip_diagonal && i == j) continue;
      s += std::exp(scale * squared_distance(ai, b.row(j), d));
    }
    return s;
  });
}

/// Sum of |a_i - b_j| over all pairs.
inline double distance_sum(const Sample& a, const Sample& b) {
  require_same_dim(a, b);
  const Index d = a.d();
  return detail::ordered_row_sum(a.n(), [&](Index i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (Index j = 0; j < b.n(); ++j) s += std::sqrt(squared_distance(ai, b.row(j), d));
    return s;
  });
}

}  // namespace ite
