#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ite/core/pairwise.hpp"
#include "ite/core/sample.hpp"
#include "ite/geometry/rank.hpp"

/// Mutual information and association measures over jointly observed blocks.
namespace ite::dependence {

using EntropyFn = std::function<double(const Sample&)>;

/// Splits the columns of `joint` into consecutive blocks of the given widths.
inline std::vector<Sample> split_blocks(const Sample& joint, std::span<const Index> widths) {
  ite::detail::require(!widths.empty(), ErrorCode::BlockError, "no block widths given");
  Index total = 0;
  for (Index w : widths) {
    ite::detail::require(w >= 1, ErrorCode::BlockError, "block widths must be positive");
    total += w;
  }
  ite::detail::require(total == joint.d(), ErrorCode::BlockError,
                  "block widths sum to " + std::to_string(total) + " but the sample has " +
                      std::to_string(joint.d()) + " columns");
  std::vector<Sample> blocks;
  Index first = 0;
  for (Index w : widths) {
    blocks.push_back(joint.columns(first, w));
    first += w;
  }
  return blocks;
}

inline void check_blocks(std::span<const Sample> blocks, std::size_t min_blocks = 2) {
  ite::detail::require(blocks.size() >= min_blocks, ErrorCode::BlockError,
                  "need at least " + std::to_string(min_blocks) + " blocks");
  for (const auto& b : blocks)
    ite::detail::require(b.n() == blocks.front().n(), ErrorCode::BlockError,
                    "blocks have different observation counts");
}

/// Shannon mutual information via I(y^1, ..., y^M) = sum_m H(y^m) - H(y).
inline double shannon_mi(std::span<const Sample> blocks, const EntropyFn& entropy_member) {
  check_blocks(blocks);
  double marginals = 0.0;
  for (const auto& b : blocks) marginals += entropy_member(b);
  return marginals - entropy_member(hstack(blocks));
}

namespace detail {

/// Row sums and total of an implicit n x n pairwise matrix.
struct RowStats {
  Vector rows;
  double total = 0.0;
};

template <typename EntryFn>
RowStats row_stats(Index n, EntryFn&& entry) {
  RowStats s;
  s.rows.resize(n);
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Index>(ui);
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += entry(i, j);
    s.rows(i) = acc;
  }, 16);
  for (Index i = 0; i < n; ++i) s.total += s.rows(i);
  return s;
}

/// trace(H A H B) / n^2 for symmetric A, B with unit-free double-centering
/// matrix H, computed without materializing A or B:
///   sum_ij A_ij B_ij - (2/n) sum_i a_i b_i + (sum A)(sum B) / n^2.
/// `product(i, j)` returns A_ij * B_ij and must be symmetric in (A, B).
template <typename ProductFn>
double centered_inner(Index n, const RowStats& a, const RowStats& b, double diagonal_product,
                      ProductFn&& product) {
  const double upper = ite::detail::ordered_row_sum(n, [&](Index i) {
    double acc = 0.0;
    for (Index j = i + 1; j < n; ++j) acc += product(i, j);
    return acc;
  });
  const auto nd = static_cast<double>(n);
  double cross_rows = 0.0;
  for (Index i = 0; i < n; ++i) cross_rows += a.rows(i) * b.rows(i);
  const double full = 2.0 * upper + nd * diagonal_product;
  return (full - 2.0 / nd * cross_rows + a.total * b.total / (nd * nd)) / (nd * nd);
}

}  // namespace detail

/// Precomputed Gaussian-kernel statistics of one block, reusable across pairs.
struct KernelBlock {
  const Sample* block = nullptr;
  double sigma = 1.0;
  detail::RowStats stats;
};

inline KernelBlock kernel_block(const Sample& block, double sigma) {
  ite::detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::BandwidthNonPositive,
                  "bandwidth must be positive");
  const double scale = -0.5 / (sigma * sigma);
  const Index d = block.d();
  KernelBlock kb{&block, sigma, {}};
  kb.stats = detail::row_stats(block.n(), [&](Index i, Index j) {
    return std::exp(scale * squared_distance(block.row(i), block.row(j), d));
  });
  return kb;
}

/// Biased HSIC (1/n^2) trace(K H L H) from precomputed kernel blocks.
inline double hsic(const KernelBlock& kx, const KernelBlock& ky) {
  const Sample& x = *kx.block;
  const Sample& y = *ky.block;
  ite::detail::require(x.n() == y.n(), ErrorCode::BlockError, "blocks have different observation counts");
  ite::detail::require(x.n() >= 4, ErrorCode::TooFewPoints, "HSIC needs at least 4 observations");
  const double sx = -0.5 / (kx.sigma * kx.sigma);
  const double sy = -0.5 / (ky.sigma * ky.sigma);
  return detail::centered_inner(x.n(), kx.stats, ky.stats, 1.0, [&](Index i, Index j) {
    // exp(a) * exp(b) folded into one exponential; a + b is symmetric in the blocks.
    return std::exp(sx * squared_distance(x.row(i), x.row(j), x.d()) +
                    sy * squared_distance(y.row(i), y.row(j), y.d()));
  });
}

/// Gaussian-kernel width for one block.
inline double block_bandwidth(const Sample& block, const Bandwidth& bw, std::uint64_t seed) {
  return bw.is_median() ? median_pairwise_distance(block, seed) : bw.value();
}

/// Hilbert-Schmidt independence criterion of two blocks with Gaussian kernels.
inline double hsic(const Sample& x, const Sample& y, const Bandwidth& bw_x = Bandwidth::median(),
                   const Bandwidth& bw_y = Bandwidth::median(), std::uint64_t seed = 0) {
  ite::detail::require(x.n() == y.n(), ErrorCode::BlockError, "blocks have different observation counts");
  ite::detail::require(x.n() >= 4, ErrorCode::TooFewPoints, "HSIC needs at least 4 observations");
  // Both blocks share one subsampling stream, keeping hsic symmetric in its blocks.
  const std::uint64_t stream = derive_seed(seed, 1);
  const auto kx = kernel_block(x, block_bandwidth(x, bw_x, stream));
  const auto ky = kernel_block(y, block_bandwidth(y, bw_y, stream));
  return hsic(kx, ky);
}

/// Precomputed pairwise-distance statistics of one block.
struct DistanceBlock {
  const Sample* block = nullptr;
  detail::RowStats stats;
};

inline DistanceBlock distance_block(const Sample& block) {
  const Index d = block.d();
  return DistanceBlock{&block, detail::row_stats(block.n(), [&](Index i, Index j) {
                         return std::sqrt(squared_distance(block.row(i), block.row(j), d));
                       })};
}

/// Squared distance covariance V^2_n: mean product of double-centered
/// distance matrices.
inline double distance_covariance_sq(const DistanceBlock& a, const DistanceBlock& b) {
  const Sample& x = *a.block;
  const Sample& y = *b.block;
  ite::detail::require(x.n() == y.n(), ErrorCode::BlockError, "blocks have different observation counts");
  ite::detail::require(x.n() >= 2, ErrorCode::TooFewPoints, "distance covariance needs 2 observations");
  return detail::centered_inner(x.n(), a.stats, b.stats, 0.0, [&](Index i, Index j) {
    return std::sqrt(squared_distance(x.row(i), x.row(j), x.d())) *
           std::sqrt(squared_distance(y.row(i), y.row(j), y.d()));
  });
}

/// Distance covariance V_n(X, Y) (square root of the V-statistic).
inline double distance_covariance(const Sample& x, const Sample& y) {
  const double v2 = distance_covariance_sq(distance_block(x), distance_block(y));
  return std::sqrt(std::max(0.0, v2));
}

/// Denominators below this make the distance correlation 0 (a constant block).
inline constexpr double kDcorFloor = 1e-14;

inline double distance_correlation(const DistanceBlock& a, const DistanceBlock& b) {
  const double vxy = distance_covariance_sq(a, b);
  const double vxx = distance_covariance_sq(a, a);
  const double vyy = distance_covariance_sq(b, b);
  const double denom = std::sqrt(std::max(0.0, vxx) * std::max(0.0, vyy));
  if (denom < kDcorFloor) return 0.0;
  return std::clamp(std::sqrt(std::max(0.0, vxy) / denom), 0.0, 1.0);
}

/// Distance correlation in [0, 1]: V(X,Y) / sqrt(V(X,X) V(Y,Y)).
inline double distance_correlation(const Sample& x, const Sample& y) {
  return distance_correlation(distance_block(x), distance_block(y));
}

enum class SpearmanVariant { Rho1, Rho2, Rho3 };

/// Multivariate Spearman's rho of the columns of `joint` on its empirical
/// copula U:
///   rho1 = h(d) [(2^d / n) sum_i prod_j (1 - U_ij) - 1]
///   rho2 = h(d) [(2^d / n) sum_i prod_j U_ij - 1]
///   rho3 = (rho1 + rho2) / 2,   h(d) = (d + 1) / (2^d - d - 1).
inline double spearman_rho(const Sample& joint, SpearmanVariant variant = SpearmanVariant::Rho3) {
  ite::detail::require(joint.d() >= 2, ErrorCode::BlockError, "need at least two columns");
  ite::detail::require(joint.n() >= 2, ErrorCode::TooFewPoints, "need at least two observations");
  const Sample u = geometry::rank_transform(joint);
  const auto d = static_cast<double>(joint.d());
  const auto n = static_cast<double>(joint.n());
  const double two_d = std::pow(2.0, d);
  const double h = (d + 1.0) / (two_d - d - 1.0);
  double lower = 0.0;
  double upper = 0.0;
  for (Index i = 0; i < joint.n(); ++i) {
    double p_low = 1.0;
    double p_up = 1.0;
    for (Index j = 0; j < joint.d(); ++j) {
      p_low *= 1.0 - u.data()(i, j);
      p_up *= u.data()(i, j);
    }
    lower += p_low;
    upper += p_up;
  }
  const double rho1 = h * (two_d / n * lower - 1.0);
  const double rho2 = h * (two_d / n * upper - 1.0);
  switch (variant) {
    case SpearmanVariant::Rho1: return rho1;
    case SpearmanVariant::Rho2: return rho2;
    case SpearmanVariant::Rho3: break;
  }
  return 0.5 * (rho1 + rho2);
}

/// Multivariate Blomqvist's beta from the empirical copula and survival copula
/// at the median point (1/2, ..., 1/2):
///   beta = h(d) (C(1/2) + Cbar(1/2) - 2^(1-d)),  h(d) = 2^(d-1) / (2^(d-1) - 1).
inline double blomqvist_beta(const Sample& joint) {
  ite::detail::require(joint.d() >= 2, ErrorCode::BlockError, "need at least two columns");
  ite::detail::require(joint.n() >= 2, ErrorCode::TooFewPoints, "need at least two observations");
  const Sample u = geometry::rank_transform(joint);
  const auto d = static_cast<double>(joint.d());
  Index below = 0;
  Index above = 0;
  for (Index i = 0; i < joint.n(); ++i) {
    bool all_below = true;
    bool all_above = true;
    for (Index j = 0; j < joint.d(); ++j) {
      const double v = u.data()(i, j);
      all_below = all_below && v <= 0.5;
      all_above = all_above && v > 0.5;
    }
    below += all_below ? 1 : 0;
    above += all_above ? 1 : 0;
  }
  const auto n = static_cast<double>(joint.n());
  const double half_pow = std::pow(2.0, d - 1.0);
  const double h = half_pow / (half_pow - 1.0);
  return h * (static_cast<double>(below) / n + static_cast<double>(above) / n - 1.0 / half_pow);
}

}  // namespace ite::dependence
