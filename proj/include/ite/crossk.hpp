#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ite/core/pairwise.hpp"
#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"
#include "ite/divergence.hpp"
#include "ite/geometry/knn.hpp"
#include "ite/geometry/special.hpp"

/// Cross-entropy, kernels on distributions and Gram-matrix checks.
namespace ite::crossk {

inline constexpr Index kDefaultK = 5;

/// kNN estimate of the cross-entropy -E_P log q:
///   log c_d + log m - psi(k) + (d/n) sum_i log nu_k(i).
inline double cross_entropy_knn_k(const Sample& x, const Sample& y, Index k = kDefaultK) {
  require_same_dim(x, y);
  const Vector nu = geometry::knn_distances(y, x, k, false).kth();
  ite::detail::require((nu.array() > 0.0).all(), ErrorCode::DuplicatePoints,
                  "an observation of the first sample is repeated in the second");
  double s = 0.0;
  for (Index i = 0; i < nu.size(); ++i) s += std::log(nu(i));
  return geometry::log_unit_ball_volume(x.d()) + std::log(static_cast<double>(y.n())) -
         geometry::digamma(static_cast<double>(k)) +
         static_cast<double>(x.d()) * s / static_cast<double>(x.n());
}

/// Expected kernel (1/(nm)) sum_ij exp(-|x_i - y_j|^2 / (2 sigma^2)), the inner
/// product of the empirical mean embeddings.
inline double expected_kernel(const Sample& x, const Sample& y, double sigma) {
  require_same_dim(x, y);
  ite::detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::BandwidthNonPositive,
                  "bandwidth must be positive");
  const double denom = static_cast<double>(x.n()) * static_cast<double>(y.n());
  const bool xf = detail::canonical_first(x, y);
  return (xf ? gaussian_kernel_sum(x, y, sigma) : gaussian_kernel_sum(y, x, sigma)) / denom;
}

/// Exponentiated Jensen-Shannon kernel exp(-u * JS), with the JS estimate
/// clipped to its population range [0, log 2] first.
inline double ejs_kernel(const Sample& x, const Sample& y, double u,
                         const divergence::DivergenceFn& js_member) {
  ite::detail::require(std::isfinite(u) && u > 0.0, ErrorCode::DomainError, "u must be positive");
  const double js = std::clamp(js_member(x, y), 0.0, std::numbers::ln2);
  return std::exp(-u * js);
}

struct GramMatrix {
  Matrix values;
  std::string kernel;
};

/// kernel(X, Y, seed) for one unordered pair.
using PairKernelFn = std::function<double(const Sample&, const Sample&, std::uint64_t)>;

/// Gram matrix over sample sets. Each unordered pair (i <= j) is evaluated
/// once with seed derive_seed(seed, i, j) and mirrored.
inline GramMatrix gram_matrix(std::span<const Sample> samples, const PairKernelFn& kernel,
                              std::uint64_t seed, std::string kernel_name = {}) {
  ite::detail::require(!samples.empty(), ErrorCode::InvalidInput, "need at least one sample set");
  for (const auto& s : samples) require_same_dim(samples.front(), s);
  const auto count = static_cast<Index>(samples.size());
  GramMatrix g{Matrix::Zero(count, count), std::move(kernel_name)};
  for (Index i = 0; i < count; ++i) {
    for (Index j = i; j < count; ++j) {
      const double v = kernel(samples[static_cast<std::size_t>(i)],
                              samples[static_cast<std::size_t>(j)],
                              derive_seed(seed, static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(j)));
      g.values(i, j) = v;
      g.values(j, i) = v;
    }
  }
  return g;
}

struct PsdResult {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

inline constexpr double kSymmetryTolerance = 1e-8;

/// Positive semi-definiteness test: psd iff the smallest eigenvalue >= -tol.
inline PsdResult psd_check(const Matrix& g, double tol) {
  ite::detail::require(g.rows() == g.cols() && g.rows() >= 1, ErrorCode::ShapeError,
                  "Gram matrix must be square and non-empty");
  ite::detail::require((g - g.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance,
                  ErrorCode::NonSymmetric, "Gram matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  const double lambda = solver.eigenvalues().minCoeff();
  return PsdResult{lambda >= -tol, lambda};
}

inline PsdResult psd_check(const GramMatrix& g, double tol) { return psd_check(g.values, tol); }

}  // namespace ite::crossk
