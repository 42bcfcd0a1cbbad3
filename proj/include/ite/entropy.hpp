#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <utility>

#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"
#include "ite/geometry/knn.hpp"
#include "ite/geometry/mst.hpp"
#include "ite/geometry/special.hpp"

/// Entropy estimators. All values are in nats.
namespace ite::entropy {

inline constexpr Index kDefaultShannonK = 3;
inline constexpr Index kDefaultRenyiK = 5;

namespace detail {

inline void check_alpha_knn(double alpha, Index k) {
  ite::detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha != 1.0, ErrorCode::InvalidAlpha,
                       "alpha must be positive and != 1, got " + std::to_string(alpha));
  ite::detail::require(static_cast<double>(k) + 1.0 - alpha > 0.0, ErrorCode::InvalidAlpha,
                       "k must exceed alpha - 1");
}

/// k-th neighbor distances within X (self excluded); zero distances mean
/// repeated rows, where the log terms are undefined.
inline Vector kth_distances_strict(const Sample& x, Index k) {
  Vector eps = geometry::knn_distances(x, k).kth();
  for (Index i = 0; i < eps.size(); ++i) {
    ite::detail::require(eps(i) > 0.0, ErrorCode::DuplicatePoints,
                         "observation " + std::to_string(i) +
                             " has a zero k-th neighbor distance (repeated rows)");
  }
  return eps;
}

inline double log_mean_exp(const Vector& v) {
  const double m = v.maxCoeff();
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
  return m + std::log(s / static_cast<double>(v.size()));
}

}  // namespace detail

/// Kozachenko-Leonenko estimator:
///   H = psi(n) - psi(k) + log c_d + (d/n) sum_i log eps_k(i).
inline double shannon_knn_k(const Sample& x, Index k = kDefaultShannonK) {
  const Vector eps = detail::kth_distances_strict(x, k);
  const auto n = static_cast<double>(x.n());
  const auto d = static_cast<double>(x.d());
  double sum_log = 0.0;
  for (Index i = 0; i < eps.size(); ++i) sum_log += std::log(eps(i));
  return geometry::digamma(n) - geometry::digamma(static_cast<double>(k)) +
         geometry::log_unit_ball_volume(x.d()) + d * sum_log / n;
}

/// log of the kNN plug-in estimate of the integral of f^alpha,
///   I = (1/n) sum_i [(n-1) C_k c_d eps_k(i)^d]^(1-alpha),
///   C_k = [Gamma(k) / Gamma(k+1-alpha)]^(1/(1-alpha)),
/// evaluated in log space.
inline double log_renyi_integral(const Sample& x, Index k, double alpha) {
  detail::check_alpha_knn(alpha, k);
  const Vector eps = detail::kth_distances_strict(x, k);
  const auto n = static_cast<double>(x.n());
  const auto d = static_cast<double>(x.d());
  const double one_minus = 1.0 - alpha;
  const double log_ck =
      (std::lgamma(static_cast<double>(k)) - std::lgamma(static_cast<double>(k) + one_minus)) /
      one_minus;
  const double base = std::log(n - 1.0) + log_ck + geometry::log_unit_ball_volume(x.d());
  Vector terms(eps.size());
  for (Index i = 0; i < eps.size(); ++i) terms(i) = one_minus * (base + d * std::log(eps(i)));
  return detail::log_mean_exp(terms);
}

/// Renyi entropy of order alpha, log(I) / (1 - alpha).
inline double renyi_knn_k(const Sample& x, Index k, double alpha) {
  return log_renyi_integral(x, k, alpha) / (1.0 - alpha);
}

/// Tsallis entropy of order alpha, (1 - I) / (alpha - 1), sharing I with renyi_knn_k.
inline double tsallis_knn_k(const Sample& x, Index k, double alpha) {
  return (1.0 - std::exp(log_renyi_integral(x, k, alpha))) / (alpha - 1.0);
}

/// Calibration sample size and replicate count for renyi_mst with mult = 1.
inline constexpr Index kMstCalibrationN = 20000;
inline constexpr int kMstCalibrationReplicates = 20;
inline constexpr std::uint64_t kMstCalibrationSeed = 0x1735A7E5ULL;

/// MST Renyi entropy without its unknown additive constant:
///   (1/(1-alpha)) log(L_gamma / n^alpha),  gamma = d (1 - alpha).
inline double renyi_mst_uncalibrated(const Sample& x, double alpha) {
  ite::detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidAlpha,
                       "MST Renyi entropy needs alpha in (0,1), got " + std::to_string(alpha));
  ite::detail::require(x.n() >= 2, ErrorCode::TooFewPoints, "MST entropy needs at least 2 points");
  const double gamma = static_cast<double>(x.d()) * (1.0 - alpha);
  const double length = geometry::euclidean_mst_weight(x, gamma);
  ite::detail::require(length > 0.0, ErrorCode::DuplicatePoints, "all observations coincide");
  return std::log(length / std::pow(static_cast<double>(x.n()), alpha)) / (1.0 - alpha);
}

/// Additive constant that makes renyi_mst vanish on Uniform[0,1]^d (whose
/// Renyi entropy is 0). Estimated once per (d, alpha) by Monte Carlo and
/// cached for the life of the process.
inline double renyi_mst_calibration(Index d, double alpha) {
  static std::mutex mutex;
  static std::map<std::pair<Index, double>, double> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(d, alpha);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  double sum = 0.0;
  for (int rep = 0; rep < kMstCalibrationReplicates; ++rep) {
    Rng rng(derive_seed(kMstCalibrationSeed, static_cast<std::uint64_t>(d),
                        static_cast<std::uint64_t>(rep)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RowMatrix u(kMstCalibrationN, d);
    for (Index i = 0; i < u.size(); ++i) u.data()[i] = unif(rng);
    sum += renyi_mst_uncalibrated(Sample(std::move(u)), alpha);
  }
  const double constant = -sum / kMstCalibrationReplicates;
  cache.emplace(key, constant);
  return constant;
}

/// MST-based Renyi entropy. With `mult` false the unknown normalization is
/// omitted (the estimate is correct up to an additive constant depending only
/// on d and alpha); with `mult` true the calibrated constant is added.
inline double renyi_mst(const Sample& x, double alpha, bool mult) {
  const double h = renyi_mst_uncalibrated(x, alpha);
  return mult ? h + renyi_mst_calibration(x.d(), alpha) : h;
}

}  // namespace ite::entropy
