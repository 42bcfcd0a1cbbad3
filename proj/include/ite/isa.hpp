#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"
#include "ite/dependence.hpp"
#include "ite/estimators.hpp"

/// Independent subspace analysis by the separation principle: ICA, then
/// clustering of the ICA components by their pairwise dependence.
namespace ite::isa {

/// Disjoint, non-empty index groups covering {0, ..., D-1}.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<std::vector<Index>> groups) : groups_(std::move(groups)) {
    for (auto& g : groups_) std::sort(g.begin(), g.end());
    std::sort(groups_.begin(), groups_.end(), [](const auto& a, const auto& b) {
      if (a.empty() || b.empty()) return a.size() < b.size();
      return a.front() < b.front();
    });
  }

  /// Consecutive groups of the given widths: {0..w0-1}, {w0..w0+w1-1}, ...
  static Partition contiguous(std::span<const Index> widths) {
    std::vector<std::vector<Index>> groups;
    Index next = 0;
    for (Index w : widths) {
      std::vector<Index> g(static_cast<std::size_t>(w));
      std::iota(g.begin(), g.end(), next);
      next += w;
      groups.push_back(std::move(g));
    }
    return Partition(std::move(groups));
  }

  static Partition from_labels(std::span<const Index> labels) {
    std::map<Index, std::vector<Index>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(static_cast<Index>(i));
    std::vector<std::vector<Index>> groups;
    for (auto& [label, g] : by_label) groups.push_back(std::move(g));
    return Partition(std::move(groups));
  }

  const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return groups_.size(); }
  const std::vector<Index>& operator[](std::size_t i) const { return groups_[i]; }

  Index element_count() const {
    Index total = 0;
    for (const auto& g : groups_) total += static_cast<Index>(g.size());
    return total;
  }

  std::vector<Index> widths() const {
    std::vector<Index> w;
    for (const auto& g : groups_) w.push_back(static_cast<Index>(g.size()));
    return w;
  }

  /// Group index of every element.
  std::vector<Index> labels() const {
    std::vector<Index> out(static_cast<std::size_t>(element_count()), -1);
    for (std::size_t m = 0; m < groups_.size(); ++m)
      for (Index i : groups_[m]) out[static_cast<std::size_t>(i)] = static_cast<Index>(m);
    return out;
  }

  /// True iff the groups are non-empty, disjoint and cover {0..d-1}.
  bool is_valid(Index d) const {
    std::vector<char> seen(static_cast<std::size_t>(std::max<Index>(d, 0)), 0);
    Index count = 0;
    for (const auto& g : groups_) {
      if (g.empty()) return false;
      for (Index i : g) {
        if (i < 0 || i >= d || seen[static_cast<std::size_t>(i)]) return false;
        seen[static_cast<std::size_t>(i)] = 1;
        ++count;
      }
    }
    return count == d;
  }

  void require_valid(Index d) const {
    ite::detail::require(is_valid(d), ErrorCode::ShapeError,
                         "partition is not a disjoint cover of " + std::to_string(d) + " indices");
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::vector<Index>> groups_;
};

// ---------------------------------------------------------------------------
// Synthetic problems

enum class SourceFamily {
  SphericalNongaussian,  // uniform direction, exponential radius
  UniformGeometric,      // uniform on the hollow cube {x in [-1,1]^w : |x|_inf >= 0.6}
};

inline std::optional<SourceFamily> parse_family(std::string_view s) {
  if (s == "spherical-nongaussian") return SourceFamily::SphericalNongaussian;
  if (s == "uniform-geometric") return SourceFamily::UniformGeometric;
  return std::nullopt;
}

struct IsaProblem {
  RowMatrix sources;  // n x D, groups in consecutive columns
  Matrix mixing;      // D x D orthogonal
  RowMatrix observed;  // sources * mixing^T
  std::vector<Index> dims;
  Partition truth;
  std::uint64_t seed = 0;
};

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix with
/// the signs of R's diagonal folded into Q).
inline Matrix random_orthogonal(Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

inline constexpr double kHollowCubeInner = 0.6;
inline constexpr Index kMinProblemSize = 100;

inline IsaProblem generate_isa_problem(std::span<const Index> dims, SourceFamily family, Index n,
                                       std::uint64_t seed) {
  ite::detail::require(!dims.empty(), ErrorCode::BadDims, "no subspace widths given");
  for (Index w : dims) ite::detail::require(w >= 1, ErrorCode::BadDims, "subspace widths must be >= 1");
  ite::detail::require(n >= kMinProblemSize, ErrorCode::BadDims, "need at least 100 observations");
  const Index total = std::accumulate(dims.begin(), dims.end(), Index{0});

  IsaProblem p;
  p.dims.assign(dims.begin(), dims.end());
  p.truth = Partition::contiguous(dims);
  p.seed = seed;
  p.sources.resize(n, total);

  Rng rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::exponential_distribution<double> radius(1.0);
  Index col = 0;
  for (Index w : dims) {
    Vector v(w);
    for (Index i = 0; i < n; ++i) {
      if (family == SourceFamily::UniformGeometric) {
        do {
          for (Index t = 0; t < w; ++t) v(t) = unif(rng);
        } while (v.cwiseAbs().maxCoeff() < kHollowCubeInner);
      } else {
        double norm = 0.0;
        do {
          for (Index t = 0; t < w; ++t) v(t) = normal(rng);
          norm = v.norm();
        } while (norm == 0.0);
        v *= radius(rng) / norm;
      }
      p.sources.row(i).segment(col, w) = v.transpose();
    }
    col += w;
  }
  Rng mix_rng(derive_seed(seed, 2));
  p.mixing = random_orthogonal(total, mix_rng);
  p.observed = p.sources * p.mixing.transpose();
  return p;
}

// ---------------------------------------------------------------------------
// ICA

struct IcaOptions {
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 1000;
};

struct IcaResult {
  Matrix rotation;   // W, orthogonal, acts on whitened data
  Matrix whitener;   // V, whitened = (X - mean) V^T
  Vector mean;
  Matrix demixing;   // W V, components = (X - mean) demixing^T
  RowMatrix components;
  bool converged = false;
  int iterations = 0;
};

/// Relative eigenvalue floor below which the covariance is treated as singular.
inline constexpr double kWhiteningFloor = 1e-12;

namespace detail {

/// (W W^T)^(-1/2) W
inline Matrix symmetric_decorrelation(const Matrix& w) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(w * w.transpose());
  const Vector inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace detail

/// Symmetric fixed-point ICA with the tanh nonlinearity on whitened data.
/// Stops when max |(|W W_prev^T| - I)| < tol; hitting max_iter returns the
/// last iterate with `converged` false.
inline IcaResult fastica(const Sample& x, const IcaOptions& options = {}) {
  const Index n = x.n();
  const Index d = x.d();
  ite::detail::require(n > d, ErrorCode::DegenerateInput, "need more observations than dimensions");
  IcaResult r;
  r.mean = x.data().colwise().mean().transpose();
  const Matrix centered = x.data().rowwise() - r.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n);
  for (Index j = 0; j < d; ++j)
    ite::detail::require(cov(j, j) > 0.0, ErrorCode::DegenerateInput,
                         "column " + std::to_string(j) + " has zero variance");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector lambda = es.eigenvalues();
  ite::detail::require(lambda.minCoeff() > kWhiteningFloor * lambda.maxCoeff(),
                       ErrorCode::DegenerateInput, "covariance is singular");
  r.whitener = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const Matrix z = centered * r.whitener.transpose();

  Rng rng(options.seed);
  Matrix w = random_orthogonal(d, rng);
  const auto nd = static_cast<double>(n);
  for (r.iterations = 1; r.iterations <= options.max_iter; ++r.iterations) {
    const Matrix y = z * w.transpose();
    const Matrix g = y.array().tanh().matrix();
    const Vector mean_dg = (1.0 - g.array().square()).colwise().mean().transpose();
    Matrix next = g.transpose() * z / nd - mean_dg.asDiagonal() * w;
    next = detail::symmetric_decorrelation(next);
    const double change =
        ((next * w.transpose()).cwiseAbs() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    w = next;
    if (change < options.tol) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, options.max_iter);
  r.rotation = w;
  r.demixing = w * r.whitener;
  r.components = z * w.transpose();
  return r;
}

// ---------------------------------------------------------------------------
// Pairwise dependence between 1-D components

/// Dependence between single columns of a sample, with per-column statistics
/// cached. Supported measures: hsic, dcor, dcov (exact pair formulas with
/// cached row sums), shannon_mi (cached marginal entropies) and any other
/// registered mutual-information estimator through the framework.
/// Column c uses seed derive_seed(seed, c) for its median bandwidth; generic
/// pairs use derive_seed(seed, i, j). Negative estimates are clipped to 0.
class PairwiseDependence {
 public:
  PairwiseDependence(const Sample& components, EstimatorConfig config, std::uint64_t seed,
                     const Registry& registry = default_registry())
      : config_(std::move(config)), seed_(seed), registry_(&registry) {
    ite::detail::require(config_.kind() == MeasureKind::MutualInformation, ErrorCode::InvalidParameterValue,
                         "pairwise dependence needs a mutual information estimator");
    ite::detail::require(components.d() >= 2, ErrorCode::BadTarget, "need at least two components");
    for (Index c = 0; c < components.d(); ++c) columns_.push_back(components.columns(c, 1));
    const std::string& name = config_.name();
    if (name == "hsic") {
      const Bandwidth bw = builtin::bandwidth_param(config_, "bandwidth1");
      for (Index c = 0; c < dim(); ++c) {
        const double sigma =
            dependence::block_bandwidth(column(c), bw, derive_seed(seed_, static_cast<std::uint64_t>(c)));
        kernels_.push_back(dependence::kernel_block(column(c), sigma));
      }
    } else if (name == "dcor" || name == "dcov") {
      for (Index c = 0; c < dim(); ++c) distances_.push_back(dependence::distance_block(column(c)));
    } else if (name == "shannon_mi") {
      for (Index c = 0; c < dim(); ++c)
        marginals_.push_back(registry_->run(config_.member(), std::span<const Sample>(&column(c), 1)));
    }
  }

  Index dim() const noexcept { return static_cast<Index>(columns_.size()); }
  const Sample& column(Index c) const { return columns_[static_cast<std::size_t>(c)]; }

  /// Clipped dependence estimate between columns i != j (symmetric).
  double operator()(Index i, Index j) const {
    if (j < i) std::swap(i, j);
    const std::string& name = config_.name();
    double v = 0.0;
    if (name == "hsic") {
      v = dependence::hsic(kernels_[static_cast<std::size_t>(i)], kernels_[static_cast<std::size_t>(j)]);
    } else if (name == "dcor") {
      v = dependence::distance_correlation(distances_[static_cast<std::size_t>(i)],
                                           distances_[static_cast<std::size_t>(j)]);
    } else if (name == "dcov") {
      v = std::sqrt(std::max(0.0, dependence::distance_covariance_sq(
                                      distances_[static_cast<std::size_t>(i)],
                                      distances_[static_cast<std::size_t>(j)])));
    } else if (name == "shannon_mi") {
      const Sample pair[2] = {column(i), column(j)};
      const Sample joint = hstack(pair);
      v = (marginals_[static_cast<std::size_t>(i)] + marginals_[static_cast<std::size_t>(j)]) -
          registry_->run(config_.member(), std::span<const Sample>(&joint, 1));
    } else {
      const Sample pair[2] = {column(i), column(j)};
      v = registry_->run(config_.with_seed(derive_seed(seed_, static_cast<std::uint64_t>(i),
                                                       static_cast<std::uint64_t>(j))),
                         pair);
    }
    return std::max(0.0, v);
  }

 private:
  EstimatorConfig config_;
  std::uint64_t seed_;
  const Registry* registry_;
  std::vector<Sample> columns_;
  std::vector<dependence::KernelBlock> kernels_;
  std::vector<dependence::DistanceBlock> distances_;
  std::vector<double> marginals_;
};

/// D x D symmetric matrix of clipped pairwise dependence, zero diagonal.
inline Matrix pairwise_mi_matrix(const Sample& components, const EstimatorConfig& dep,
                                 std::uint64_t seed) {
  const PairwiseDependence pairs(components, dep, seed);
  const Index d = components.d();
  Matrix s = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) s(i, j) = s(j, i) = pairs(i, j);
  return s;
}

// ---------------------------------------------------------------------------
// Clustering

/// Either exact group widths or just a group count.
struct ClusterTarget {
  std::vector<Index> widths;
  Index groups = 0;

  static ClusterTarget with_widths(std::vector<Index> w) { return {std::move(w), 0}; }
  static ClusterTarget with_groups(Index m) { return {{}, m}; }
  Index group_count() const { return widths.empty() ? groups : static_cast<Index>(widths.size()); }
};

struct ClusterOptions {
  std::uint64_t seed = 0;
  int restarts = 20;
  int max_kmeans_iter = 100;
  Index exhaustive_max_dim = 10;
};

struct ClusterResult {
  Partition partition;
  double cut = 0.0;
  bool degenerate = false;  // all-zero similarity; partition is arbitrary
  bool exhaustive = false;
};

/// Sum of similarity over pairs in different groups.
inline double cut_weight(const Matrix& s, const Partition& p) {
  const auto labels = p.labels();
  double cut = 0.0;
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = i + 1; j < s.cols(); ++j)
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) cut += s(i, j);
  return cut;
}

namespace detail {

inline void check_target(const Matrix& s, const ClusterTarget& t) {
  const Index d = s.rows();
  if (!t.widths.empty()) {
    Index total = 0;
    for (Index w : t.widths) {
      ite::detail::require(w >= 1, ErrorCode::BadTarget, "group widths must be >= 1");
      total += w;
    }
    ite::detail::require(total == d, ErrorCode::BadTarget,
                         "group widths sum to " + std::to_string(total) + ", expected " +
                             std::to_string(d));
  } else {
    ite::detail::require(t.groups >= 1 && t.groups <= d, ErrorCode::BadTarget,
                         "group count must lie in [1, D]");
  }
}

/// Balanced contiguous partition used when the similarity carries no signal.
inline Partition fallback_partition(Index d, const ClusterTarget& t) {
  if (!t.widths.empty()) return Partition::contiguous(t.widths);
  std::vector<Index> widths(static_cast<std::size_t>(t.groups), d / t.groups);
  for (Index m = 0; m < d % t.groups; ++m) ++widths[static_cast<std::size_t>(m)];
  return Partition::contiguous(widths);
}

/// Exact minimum-cut partition with the given group widths by enumeration.
/// Groups of equal width are filled in order to skip relabelings.
class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const Matrix& s, std::vector<Index> widths)
      : s_(s), widths_(std::move(widths)), labels_(static_cast<std::size_t>(s.rows()), -1),
        fill_(widths_.size(), 0) {}

  Partition run() {
    best_cut_ = std::numeric_limits<double>::infinity();
    assign(0, 0.0);
    return Partition::from_labels(best_labels_);
  }
  double best_cut() const { return best_cut_; }

 private:
  void assign(Index element, double cut) {
    if (cut >= best_cut_) return;
    const Index d = s_.rows();
    if (element == d) {
      best_cut_ = cut;
      best_labels_ = labels_;
      return;
    }
    for (std::size_t g = 0; g < widths_.size(); ++g) {
      if (fill_[g] >= widths_[g]) continue;
      // an empty group may only open if every earlier group of the same width is non-empty
      if (fill_[g] == 0) {
        bool blocked = false;
        for (std::size_t h = 0; h < g; ++h)
          if (widths_[h] == widths_[g] && fill_[h] == 0) blocked = true;
        if (blocked) continue;
      }
      double added = 0.0;
      for (Index u = 0; u < element; ++u)
        if (labels_[static_cast<std::size_t>(u)] != static_cast<Index>(g)) added += s_(element, u);
      labels_[static_cast<std::size_t>(element)] = static_cast<Index>(g);
      ++fill_[g];
      assign(element + 1, cut + added);
      --fill_[g];
      labels_[static_cast<std::size_t>(element)] = -1;
    }
  }

  const Matrix& s_;
  std::vector<Index> widths_;
  std::vector<Index> labels_;
  std::vector<Index> fill_;
  std::vector<Index> best_labels_;
  double best_cut_ = 0.0;
};

/// Best of `restarts` k-means++ / Lloyd runs on the rows of `points`.
inline std::vector<Index> kmeans(const Matrix& points, Index k, int restarts, int max_iter,
                                 std::uint64_t seed) {
  const Index n = points.rows();
  std::vector<Index> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix centers(k, points.cols());
    std::uniform_int_distribution<Index> first(0, n - 1);
    centers.row(0) = points.row(first(rng));
    Vector nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (Index c = 1; c < k; ++c) {
      const double total = nearest.sum();
      Index pick = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        for (pick = 0; pick < n - 1; ++pick) {
          target -= nearest(pick);
          if (target <= 0.0) break;
        }
      } else {
        pick = first(rng);
      }
      centers.row(c) = points.row(pick);
      nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<Index> labels(static_cast<std::size_t>(n), -1);
    double obj = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      obj = 0.0;
      for (Index i = 0; i < n; ++i) {
        Index arg = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < k; ++c) {
          const double dist = (points.row(i) - centers.row(c)).squaredNorm();
          if (dist < bestd) {
            bestd = dist;
            arg = c;
          }
        }
        obj += bestd;
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      // Recompute centers; an empty cluster takes the point farthest from its center.
      Matrix sums = Matrix::Zero(k, points.cols());
      std::vector<Index> counts(static_cast<std::size_t>(k), 0);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (Index c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        } else {
          Index far = 0;
          double fard = -1.0;
          for (Index i = 0; i < n; ++i) {
            const double dist =
                (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
            if (dist > fard) {
              fard = dist;
              far = i;
            }
          }
          centers.row(c) = points.row(far);
          labels[static_cast<std::size_t>(far)] = c;
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = labels;
    }
  }
  return best;
}

/// Moves elements from oversized to undersized groups (cheapest cut increase
/// first), then applies improving swaps until none is left.
inline Partition repair_widths(const Matrix& s, const Partition& clustered,
                               std::vector<Index> widths) {
  const Index d = s.rows();
  auto groups = clustered.groups();
  const auto m = groups.size();
  // Pair clusters with target widths by size rank.
  std::vector<std::size_t> by_size(m);
  std::iota(by_size.begin(), by_size.end(), 0);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return groups[a].size() > groups[b].size(); });
  std::sort(widths.begin(), widths.end(), std::greater<>());
  std::vector<Index> target(m);
  for (std::size_t r = 0; r < m; ++r) target[by_size[r]] = widths[r];

  std::vector<Index> label(static_cast<std::size_t>(d));
  for (std::size_t g = 0; g < m; ++g)
    for (Index e : groups[g]) label[static_cast<std::size_t>(e)] = static_cast<Index>(g);
  std::vector<Index> size(m);
  for (std::size_t g = 0; g < m; ++g) size[g] = static_cast<Index>(groups[g].size());

  auto link = [&](Index e, std::size_t g) {
    double t = 0.0;
    for (Index u = 0; u < d; ++u)
      if (u != e && label[static_cast<std::size_t>(u)] == static_cast<Index>(g)) t += s(e, u);
    return t;
  };

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    Index best_e = -1;
    std::size_t best_g = 0;
    for (Index e = 0; e < d; ++e) {
      const auto src = static_cast<std::size_t>(label[static_cast<std::size_t>(e)]);
      if (size[src] <= target[src]) continue;
      for (std::size_t g = 0; g < m; ++g) {
        if (size[g] >= target[g]) continue;
        const double delta = link(e, src) - link(e, g);
        if (delta < best) {
          best = delta;
          best_e = e;
          best_g = g;
        }
      }
    }
    if (best_e < 0) break;
    --size[static_cast<std::size_t>(label[static_cast<std::size_t>(best_e)])];
    ++size[best_g];
    label[static_cast<std::size_t>(best_e)] = static_cast<Index>(best_g);
  }

  for (Index round = 0; round < d * d; ++round) {
    double best = -1e-12;
    Index be = -1;
    Index bf = -1;
    for (Index e = 0; e < d; ++e) {
      for (Index f = e + 1; f < d; ++f) {
        const auto ge = static_cast<std::size_t>(label[static_cast<std::size_t>(e)]);
        const auto gf = static_cast<std::size_t>(label[static_cast<std::size_t>(f)]);
        if (ge == gf) continue;
        const double delta = (link(e, ge) - link(e, gf)) + (link(f, gf) - link(f, ge)) + 2.0 * s(e, f);
        if (delta < best) {
          best = delta;
          be = e;
          bf = f;
        }
      }
    }
    if (be < 0) break;
    std::swap(label[static_cast<std::size_t>(be)], label[static_cast<std::size_t>(bf)]);
  }
  return Partition::from_labels(label);
}

}  // namespace detail

/// Groups components by similarity. With known widths and D <= 10 the exact
/// minimum-cut partition is found by enumeration. Otherwise normalized-cut
/// spectral clustering: eigenvectors of the random-walk normalized
/// similarity, k-means with seeded restarts, then (given widths) a greedy
/// repair to the exact group sizes.
inline ClusterResult cluster_components(const Matrix& s, const ClusterTarget& target,
                                        const ClusterOptions& options = {}) {
  ite::detail::require(s.rows() == s.cols() && s.rows() >= 1, ErrorCode::ShapeError,
                       "similarity must be square");
  ite::detail::require((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::ShapeError,
                       "similarity must be symmetric");
  ite::detail::require(s.minCoeff() >= 0.0, ErrorCode::ShapeError, "similarity must be nonnegative");
  detail::check_target(s, target);
  const Index d = s.rows();
  const Index m = target.group_count();

  ClusterResult result;
  Matrix off = s;
  off.diagonal().setZero();
  if (off.maxCoeff() <= 0.0) {
    result.partition = detail::fallback_partition(d, target);
    result.degenerate = true;
  } else if (!target.widths.empty() && d <= options.exhaustive_max_dim) {
    detail::ExhaustiveSearch search(off, target.widths);
    result.partition = search.run();
    result.exhaustive = true;
  } else if (m == 1) {
    result.partition = detail::fallback_partition(d, ClusterTarget::with_groups(1));
  } else {
    // Tiny uniform ridge keeps every degree positive.
    Matrix w = off.array() + 1e-12 * off.maxCoeff();
    w.diagonal().setZero();
    const Vector inv_sqrt_deg = w.rowwise().sum().cwiseSqrt().cwiseInverse();
    const Matrix normalized = inv_sqrt_deg.asDiagonal() * w * inv_sqrt_deg.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Matrix> es(normalized);
    const Matrix embedding = inv_sqrt_deg.asDiagonal() * es.eigenvectors().rightCols(m);
    const auto labels =
        detail::kmeans(embedding, m, options.restarts, options.max_kmeans_iter, options.seed);
    result.partition = Partition::from_labels(labels);
    if (!target.widths.empty() && result.partition.size() == static_cast<std::size_t>(m))
      result.partition = detail::repair_widths(off, result.partition, target.widths);
  }
  result.partition.require_valid(d);
  result.cut = cut_weight(off, result.partition);
  return result;
}

// ---------------------------------------------------------------------------
// Objectives and scores

enum class Objective { I, IRecursive, SumH, IPairwise, IPairwise1d };

inline std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::I: return "J_I";
    case Objective::IRecursive: return "J_Irecursive";
    case Objective::SumH: return "J_sumH";
    case Objective::IPairwise: return "J_Ipairwise";
    case Objective::IPairwise1d: return "J_Ipairwise1d";
  }
  return "unknown";
}

struct ObjectiveMembers {
  EstimatorConfig entropy;  // for J_sumH
  EstimatorConfig mi;       // for the mutual-information objectives

  static ObjectiveMembers defaults(std::string_view mi_name = "hsic") {
    return {initialize(MeasureKind::Entropy, "shannon_knn_k").value(),
            initialize(MeasureKind::MutualInformation, mi_name).value()};
  }
};

namespace detail {

inline Sample group_columns(const Sample& components, const std::vector<Index>& group) {
  return components.select_columns(group);
}

/// J_Ipairwise1d from any symmetric pair evaluator: sum over ordered pairs of
/// columns in different groups, in row-major order.
template <typename PairFn>
double cross_group_sum(Index d, const Partition& p, PairFn&& pair) {
  const auto labels = p.labels();
  double total = 0.0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) total += pair(i, j);
  return total;
}

}  // namespace detail

/// J_Ipairwise1d read off a precomputed pairwise dependence matrix.
inline double pairwise1d_from_matrix(const Matrix& s, const Partition& p) {
  p.require_valid(s.rows());
  return detail::cross_group_sum(s.rows(), p, [&](Index i, Index j) { return s(i, j); });
}

/// ISA cost of a grouping of the components (lower is better).
///   J_I          = I(y^1, ..., y^M)
///   J_Irecursive = sum_{m<M} I(y^m, [y^{m+1}, ..., y^M])
///   J_sumH       = sum_m H(y^m)
///   J_Ipairwise  = sum_{m1 != m2} I(y^m1, y^m2)
///   J_Ipairwise1d = sum_{m1 != m2} sum_{i in m1, j in m2} I(y_i, y_j)
/// J_Ipairwise1d shares its terms (and seeds) with pairwise_mi_matrix.
inline double isa_objective(const Sample& components, const Partition& p, Objective which,
                            const ObjectiveMembers& members, std::uint64_t seed,
                            const Registry& registry = default_registry()) {
  p.require_valid(components.d());
  std::vector<Sample> blocks;
  for (const auto& g : p.groups()) blocks.push_back(detail::group_columns(components, g));
  const auto mcount = blocks.size();
  auto mi = [&](std::span<const Sample> args, std::uint64_t stream) {
    return registry.run(members.mi.with_seed(derive_seed(seed, stream)), args);
  };

  switch (which) {
    case Objective::SumH: {
      double total = 0.0;
      for (const auto& b : blocks) total += registry.run(members.entropy, std::span<const Sample>(&b, 1));
      return total;
    }
    case Objective::I:
      ite::detail::require(mcount >= 2, ErrorCode::BlockError, "J_I needs at least two groups");
      return mi(blocks, 0);
    case Objective::IRecursive: {
      double total = 0.0;
      for (std::size_t m = 0; m + 1 < mcount; ++m) {
        const Sample rest = hstack(std::span<const Sample>(blocks).subspan(m + 1));
        const Sample pair[2] = {blocks[m], rest};
        total += mi(pair, m);
      }
      return total;
    }
    case Objective::IPairwise: {
      double total = 0.0;
      for (std::size_t a = 0; a < mcount; ++a) {
        for (std::size_t b = a + 1; b < mcount; ++b) {
          const Sample pair[2] = {blocks[a], blocks[b]};
          total += mi(pair, a * mcount + b);
        }
      }
      return 2.0 * total;  // ordered pairs
    }
    case Objective::IPairwise1d: {
      const PairwiseDependence pairs(components, members.mi, seed, registry);
      return detail::cross_group_sum(components.d(), p, pairs);
    }
  }
  return 0.0;
}

/// Block Amari index in [0, 1] of G whose rows are grouped by `rows` and
/// columns by `cols` (same group count M). With N_ij the Frobenius norm of
/// block (i, j):
///   [sum_i (sum_j N_ij / max_j N_ij - 1) + sum_j (sum_i N_ij / max_i N_ij - 1)] / (2 M (M - 1)).
/// Zero exactly when N is a scaled permutation.
inline double amari_index(const Matrix& g, const Partition& rows, const Partition& cols) {
  ite::detail::require(g.rows() == g.cols(), ErrorCode::ShapeError, "matrix must be square");
  ite::detail::require(rows.is_valid(g.rows()) && cols.is_valid(g.cols()), ErrorCode::ShapeError,
                       "partition does not match the matrix size");
  ite::detail::require(rows.size() == cols.size(), ErrorCode::ShapeError,
                       "row and column partitions have different group counts");
  const auto m = static_cast<Index>(rows.size());
  if (m == 1) return 0.0;
  Matrix blocks(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      double sq = 0.0;
      for (Index r : rows[static_cast<std::size_t>(i)])
        for (Index c : cols[static_cast<std::size_t>(j)]) sq += g(r, c) * g(r, c);
      blocks(i, j) = std::sqrt(sq);
    }
  }
  auto spread = [m](const auto& v) {
    const double mx = v.maxCoeff();
    return mx > 0.0 ? v.sum() / mx - 1.0 : static_cast<double>(m - 1);
  };
  double total = 0.0;
  for (Index i = 0; i < m; ++i) total += spread(blocks.row(i));
  for (Index j = 0; j < m; ++j) total += spread(blocks.col(j));
  return total / (2.0 * static_cast<double>(m) * static_cast<double>(m - 1));
}

inline double amari_index(const Matrix& g, const Partition& p) { return amari_index(g, p, p); }

/// Groups the rows of G = W A by the true column group carrying the largest
/// row-block norm (the true grouping of recovered components).
inline Partition induced_grouping(const Matrix& g, const Partition& truth) {
  std::vector<Index> labels(static_cast<std::size_t>(g.rows()));
  for (Index r = 0; r < g.rows(); ++r) {
    double best = -1.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
      double sq = 0.0;
      for (Index c : truth[m]) sq += g(r, c) * g(r, c);
      if (sq > best) {
        best = sq;
        labels[static_cast<std::size_t>(r)] = static_cast<Index>(m);
      }
    }
  }
  return Partition::from_labels(labels);
}

// ---------------------------------------------------------------------------
// Pipeline

struct IsaConfig {
  ClusterTarget target;
  EstimatorConfig dependence = initialize(MeasureKind::MutualInformation, "hsic").value();
  ObjectiveMembers objectives = ObjectiveMembers::defaults();
  IcaOptions ica;
  ClusterOptions cluster;
};

struct IsaDiagnostics {
  bool ica_converged = false;
  int ica_iterations = 0;
  bool degenerate_similarity = false;
  bool exhaustive_search = false;
  double cut = 0.0;
  std::map<std::string, double> objectives;
  std::optional<double> amari;
  std::optional<bool> grouping_exact;
};

struct IsaResult {
  Partition partition;     // over ICA component indices
  RowMatrix recovered;     // components, regrouped group by group
  Matrix demixing;         // rows regrouped like `recovered`
  Matrix similarity;
  IcaResult ica;
  IsaDiagnostics diagnostics;
};

/// Stage seeds derived from the pipeline seed.
enum SeedStream : std::uint64_t { kIcaStream = 1, kPairwiseStream = 2, kClusterStream = 3, kObjectiveStream = 4 };

/// ICA, pairwise dependence of the components, clustering. When `truth` is
/// given the diagnostics also carry the block Amari index of W A and whether
/// the grouping is exact.
inline IsaResult run_isa_pipeline(const Sample& x, const IsaConfig& config, std::uint64_t seed,
                                  const IsaProblem* truth = nullptr) {
  IsaResult r;
  IcaOptions ica_opts = config.ica;
  ica_opts.seed = derive_seed(seed, kIcaStream);
  r.ica = fastica(x, ica_opts);
  const Sample components(r.ica.components);

  r.similarity = pairwise_mi_matrix(components, config.dependence, derive_seed(seed, kPairwiseStream));
  ClusterOptions cl = config.cluster;
  cl.seed = derive_seed(seed, kClusterStream);
  const ClusterResult clustered = cluster_components(r.similarity, config.target, cl);
  r.partition = clustered.partition;

  std::vector<Index> order;
  for (const auto& g : r.partition.groups()) order.insert(order.end(), g.begin(), g.end());
  r.recovered = components.select_columns(order).data();
  r.demixing.resize(r.ica.demixing.rows(), r.ica.demixing.cols());
  for (std::size_t i = 0; i < order.size(); ++i)
    r.demixing.row(static_cast<Index>(i)) = r.ica.demixing.row(order[i]);

  auto& diag = r.diagnostics;
  diag.ica_converged = r.ica.converged;
  diag.ica_iterations = r.ica.iterations;
  diag.degenerate_similarity = clustered.degenerate;
  diag.exhaustive_search = clustered.exhaustive;
  diag.cut = clustered.cut;
  const std::uint64_t obj_seed = derive_seed(seed, kObjectiveStream);
  diag.objectives[std::string(to_string(Objective::IPairwise1d))] =
      pairwise1d_from_matrix(r.similarity, r.partition);
  diag.objectives[std::string(to_string(Objective::SumH))] =
      isa_objective(components, r.partition, Objective::SumH, config.objectives, obj_seed);
  if (r.partition.size() >= 2) {
    diag.objectives[std::string(to_string(Objective::IPairwise))] =
        isa_objective(components, r.partition, Objective::IPairwise, config.objectives, obj_seed);
  }

  if (truth != nullptr) {
    const Matrix g = r.ica.demixing * truth->mixing;
    const Partition induced = induced_grouping(g, truth->truth);
    diag.grouping_exact = induced == r.partition;
    if (r.partition.size() == truth->truth.size()) diag.amari = amari_index(g, r.partition, truth->truth);
  }
  return r;
}

}  // namespace ite::isa
