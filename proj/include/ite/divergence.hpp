#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ite/core/pairwise.hpp"
#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"
#include "ite/entropy.hpp"
#include "ite/geometry/knn.hpp"
#include "ite/geometry/special.hpp"

/// Two-sample divergence estimators. X is drawn from P, Y from Q.
namespace ite::divergence {

inline constexpr Index kDefaultK = 5;

namespace detail {

struct KnnTerms {
  Vector rho;  // k-th neighbor of x_i within X \ {x_i}
  Vector nu;   // k-th neighbor of x_i within Y
};

inline KnnTerms knn_terms(const Sample& x, const Sample& y, Index k) {
  require_same_dim(x, y);
  ite::detail::require(k >= 1, ErrorCode::KTooLarge, "k must be positive");
  ite::detail::require(x.n() >= k + 1, ErrorCode::KTooLarge,
                       "first sample needs more than k observations");
  ite::detail::require(y.n() >= k, ErrorCode::KTooLarge,
                       "second sample needs at least k observations");
  KnnTerms t{geometry::knn_distances(x, k).kth(), geometry::knn_distances(y, x, k, false).kth()};
  ite::detail::require((t.rho.array() > 0.0).all(), ErrorCode::DuplicatePoints,
                       "zero neighbor distance within the first sample (repeated rows)");
  ite::detail::require((t.nu.array() > 0.0).all(), ErrorCode::DuplicatePoints,
                       "an observation of the first sample is repeated in the second");
  return t;
}

inline void check_alpha_div(double alpha, Index k) {
  ite::detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha != 1.0, ErrorCode::InvalidAlpha,
                       "alpha must be positive and != 1, got " + std::to_string(alpha));
  const auto kd = static_cast<double>(k);
  ite::detail::require(kd - alpha + 1.0 > 0.0 && kd + alpha - 1.0 > 0.0, ErrorCode::InvalidAlpha,
                       "k must exceed |alpha - 1|");
}

}  // namespace detail

/// Kullback-Leibler divergence D(P||Q) from k-th neighbor distances:
///   (d/n) sum_i log(nu_k(i) / rho_k(i)) + log(m / (n - 1)).
inline double kl_knn_k(const Sample& x, const Sample& y, Index k = kDefaultK) {
  const auto t = detail::knn_terms(x, y, k);
  const auto n = static_cast<double>(x.n());
  const auto m = static_cast<double>(y.n());
  double s = 0.0;
  for (Index i = 0; i < t.rho.size(); ++i) s += std::log(t.nu(i) / t.rho(i));
  return static_cast<double>(x.d()) * s / n + std::log(m / (n - 1.0));
}

/// log of the bias-corrected kNN estimate of the integral of p^alpha q^(1-alpha):
///   I = B_{k,alpha} (1/n) sum_i [((n-1) rho_k(i)^d) / (m nu_k(i)^d)]^(1-alpha),
///   B_{k,alpha} = Gamma(k)^2 / (Gamma(k-alpha+1) Gamma(k+alpha-1)).
inline double log_alpha_integral(const Sample& x, const Sample& y, Index k, double alpha) {
  detail::check_alpha_div(alpha, k);
  const auto t = detail::knn_terms(x, y, k);
  const auto n = static_cast<double>(x.n());
  const auto m = static_cast<double>(y.n());
  const auto d = static_cast<double>(x.d());
  const auto kd = static_cast<double>(k);
  const double log_b =
      2.0 * std::lgamma(kd) - std::lgamma(kd - alpha + 1.0) - std::lgamma(kd + alpha - 1.0);
  const double base = std::log(n - 1.0) - std::log(m);
  Vector terms(t.rho.size());
  for (Index i = 0; i < terms.size(); ++i)
    terms(i) = (1.0 - alpha) * (base + d * (std::log(t.rho(i)) - std::log(t.nu(i))));
  return log_b + entropy::detail::log_mean_exp(terms);
}

/// Renyi divergence of order alpha, log(I) / (alpha - 1).
inline double renyi_knn_k(const Sample& x, const Sample& y, Index k, double alpha) {
  return log_alpha_integral(x, y, k, alpha) / (alpha - 1.0);
}

/// Tsallis divergence of order alpha, (I - 1) / (alpha - 1).
inline double tsallis_knn_k(const Sample& x, const Sample& y, Index k, double alpha) {
  return (std::exp(log_alpha_integral(x, y, k, alpha)) - 1.0) / (alpha - 1.0);
}

/// L2 distance (integral of (p - q)^2)^(1/2). Each of the integrals of p^2,
/// pq and q^2 is a kNN estimate of an expected density, using the unbiased
/// (k - 1) / (N c_d r_k^d) form; the pq cross term averages the estimates
/// taken from both sides. The squared distance is clipped at zero.
inline double l2_knn_k(const Sample& x, const Sample& y, Index k = kDefaultK) {
  ite::detail::require(k >= 2, ErrorCode::DomainError, "L2 divergence needs k >= 2");
  const auto tx = detail::knn_terms(x, y, k);
  const auto ty = detail::knn_terms(y, x, k);
  const auto n = static_cast<double>(x.n());
  const auto m = static_cast<double>(y.n());
  const auto d = static_cast<double>(x.d());
  const double cd = std::exp(geometry::log_unit_ball_volume(x.d()));
  const double km1 = static_cast<double>(k) - 1.0;
  auto mean_inverse_volume = [&](const Vector& r, double count) {
    double s = 0.0;
    for (Index i = 0; i < r.size(); ++i) s += km1 / (count * cd * std::pow(r(i), d));
    return s / static_cast<double>(r.size());
  };
  const double pp = mean_inverse_volume(tx.rho, n - 1.0);
  const double qq = mean_inverse_volume(ty.rho, m - 1.0);
  const double pq = 0.5 * (mean_inverse_volume(tx.nu, m) + mean_inverse_volume(ty.nu, n));
  return std::sqrt(std::max(0.0, (pp + qq) - 2.0 * pq));
}

enum class MmdVariant { Biased, Unbiased };

/// Resolves a bandwidth; the median heuristic pools both samples in canonical
/// order so the result does not depend on argument order.
inline double resolve_bandwidth(const Bandwidth& bw, const Sample& x, const Sample& y,
                                std::uint64_t seed) {
  if (!bw.is_median()) return bw.value();
  const bool xf = ite::detail::canonical_first(x, y);
  const Sample blocks[2] = {xf ? x : y, xf ? y : x};
  RowMatrix pooled(x.n() + y.n(), x.d());
  pooled.topRows(blocks[0].n()) = blocks[0].data();
  pooled.bottomRows(blocks[1].n()) = blocks[1].data();
  return median_pairwise_distance(Sample(std::move(pooled)), seed);
}

/// Maximum mean discrepancy with a Gaussian kernel. Biased: square root of the
/// V-statistic (never negative). Unbiased: the U-statistic estimate of MMD^2,
/// returned signed and without a square root.
inline double mmd(const Sample& x, const Sample& y, const Bandwidth& bw = Bandwidth::median(),
                  MmdVariant variant = MmdVariant::Biased, std::uint64_t seed = 0) {
  require_same_dim(x, y);
  const double sigma = resolve_bandwidth(bw, x, y, seed);
  const auto n = static_cast<double>(x.n());
  const auto m = static_cast<double>(y.n());
  const bool xf = ite::detail::canonical_first(x, y);
  const double kxy = (xf ? gaussian_kernel_sum(x, y, sigma) : gaussian_kernel_sum(y, x, sigma)) / (n * m);
  if (variant == MmdVariant::Biased) {
    const double kxx = gaussian_kernel_sum(x, x, sigma) / (n * n);
    const double kyy = gaussian_kernel_sum(y, y, sigma) / (m * m);
    return std::sqrt(std::max(0.0, (kxx + kyy) - 2.0 * kxy));
  }
  ite::detail::require(x.n() >= 2 && y.n() >= 2, ErrorCode::TooFewPoints,
                       "unbiased MMD needs at least 2 observations per sample");
  const double kxx = gaussian_kernel_sum(x, x, sigma, true) / (n * (n - 1.0));
  const double kyy = gaussian_kernel_sum(y, y, sigma, true) / (m * (m - 1.0));
  return (kxx + kyy) - 2.0 * kxy;
}

/// Energy distance 2 E|X-Y| - E|X-X'| - E|Y-Y'| as a V-statistic.
inline double energy_distance(const Sample& x, const Sample& y) {
  require_same_dim(x, y);
  const auto n = static_cast<double>(x.n());
  const auto m = static_cast<double>(y.n());
  const bool xf = ite::detail::canonical_first(x, y);
  const double cross = (xf ? distance_sum(x, y) : distance_sum(y, x)) / (n * m);
  const double within_x = distance_sum(x, x) / (n * n);
  const double within_y = distance_sum(y, y) / (m * m);
  return 2.0 * cross - (within_x + within_y);
}

using DivergenceFn = std::function<double(const Sample&, const Sample&)>;
using EntropyFn = std::function<double(const Sample&)>;

/// Symmetrized divergence member(X, Y) + member(Y, X).
inline double jdistance(const Sample& x, const Sample& y, const DivergenceFn& member) {
  return member(x, y) + member(y, x);
}

struct MixtureWeights {
  double first = 0.5;
  double second = 0.5;
};

inline void check_weights(const MixtureWeights& w) {
  ite::detail::require(w.first > 0.0 && w.second > 0.0 &&
                           std::abs(w.first + w.second - 1.0) <= 1e-12,
                       ErrorCode::WeightError, "mixture weights must be positive and sum to 1");
}

/// Sample of the mixture first*P + second*Q with size min(n, m):
/// round(first * size) rows of X and the rest of Y, drawn without replacement.
/// When X and Y are the same sample the mixture is P itself and all rows come
/// from X, which keeps the draw free of repeated rows.
inline Sample mixture_sample(const Sample& x, const Sample& y, const MixtureWeights& w,
                             std::uint64_t seed) {
  require_same_dim(x, y);
  check_weights(w);
  const Index size = std::min(x.n(), y.n());
  if (x == y) {
    return Sample(ite::detail::take_rows(
        x.data(), ite::detail::draw_without_replacement(x.n(), size, derive_seed(seed, 1))));
  }
  const auto from_x = static_cast<Index>(std::llround(w.first * static_cast<double>(size)));
  const Index from_y = size - from_x;
  RowMatrix z(size, x.d());
  if (from_x > 0)
    z.topRows(from_x) = ite::detail::take_rows(
        x.data(), ite::detail::draw_without_replacement(x.n(), from_x, derive_seed(seed, 1)));
  if (from_y > 0)
    z.bottomRows(from_y) = ite::detail::take_rows(
        y.data(), ite::detail::draw_without_replacement(y.n(), from_y, derive_seed(seed, 2)));
  return Sample(std::move(z));
}

/// Jensen-Shannon divergence through the entropy identity
///   H(mixture) - first * H(X) - second * H(Y).
inline double jensen_shannon(const Sample& x, const Sample& y, const MixtureWeights& w,
                             const EntropyFn& entropy_member, std::uint64_t seed) {
  const Sample z = mixture_sample(x, y, w, seed);
  return entropy_member(z) - w.first * entropy_member(x) - w.second * entropy_member(y);
}

}  // namespace ite::divergence
