#pragma once

// Shared generators and brute-force oracles for the test suites. Oracles are
// written independently of the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"

namespace testing_support {

using ite::Index;
using ite::RowMatrix;
using ite::Sample;

inline Sample gaussian(Index n, Index d, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  ite::Rng rng(seed);
  std::normal_distribution<double> normal(mean, sd);
  RowMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return Sample(std::move(m));
}

inline Sample uniform(Index n, Index d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  ite::Rng rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RowMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = u(rng);
  return Sample(std::move(m));
}

/// Standard bivariate Gaussian with correlation rho.
inline Sample correlated(Index n, double rho, std::uint64_t seed) {
  ite::Rng rng(seed);
  std::normal_distribution<double> normal;
  RowMatrix m(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    m(i, 0) = a;
    m(i, 1) = rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
  return Sample(std::move(m));
}

/// Random rotation (Gram-Schmidt on a Gaussian matrix).
inline ite::Matrix rotation(Index d, std::uint64_t seed) {
  ite::Rng rng(seed);
  std::normal_distribution<double> normal;
  ite::Matrix q(d, d);
  for (Index j = 0; j < d; ++j) {
    ite::Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = normal(rng);
    for (Index t = 0; t < j; ++t) v -= q.col(t).dot(v) * q.col(t);
    q.col(j) = v.normalized();
  }
  return q;
}

/// Applies x -> R x + t to every row.
inline Sample isometry(const Sample& s, const ite::Matrix& r, const ite::Vector& t) {
  RowMatrix m = (s.data() * r.transpose()).rowwise() + t.transpose();
  return Sample(std::move(m));
}

inline double dist_sq(const Sample& a, Index i, const Sample& b, Index j) {
  double s = 0.0;
  for (Index t = 0; t < a.d(); ++t) {
    const double diff = a.data()(i, t) - b.data()(j, t);
    s += diff * diff;
  }
  return s;
}

/// Exhaustive kNN: for every query, the sorted distances to the k nearest
/// points (ties by lowest index), optionally skipping the query's own index.
inline RowMatrix brute_knn(const Sample& points, const Sample& queries, Index k, bool self_excluded) {
  RowMatrix out(queries.n(), k);
  std::vector<std::pair<double, Index>> all;
  for (Index q = 0; q < queries.n(); ++q) {
    all.clear();
    for (Index p = 0; p < points.n(); ++p) {
      if (self_excluded && p == q) continue;
      all.emplace_back(dist_sq(queries, q, points, p), p);
    }
    std::sort(all.begin(), all.end());
    for (Index j = 0; j < k; ++j) out(q, j) = std::sqrt(all[static_cast<std::size_t>(j)].first);
  }
  return out;
}

/// Prim's algorithm on the dense distance matrix; returns squared edge
/// lengths of the minimum spanning tree.
inline std::vector<double> prim_oracle(const Sample& points) {
  const Index n = points.n();
  std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  std::vector<double> edges;
  best[0] = 0.0;
  for (Index step = 0; step < n; ++step) {
    Index u = -1;
    for (Index v = 0; v < n; ++v)
      if (!in[static_cast<std::size_t>(v)] && (u < 0 || best[static_cast<std::size_t>(v)] < best[static_cast<std::size_t>(u)]))
        u = v;
    in[static_cast<std::size_t>(u)] = 1;
    if (step > 0) edges.push_back(best[static_cast<std::size_t>(u)]);
    for (Index v = 0; v < n; ++v)
      if (!in[static_cast<std::size_t>(v)]) best[static_cast<std::size_t>(v)] = std::min(best[static_cast<std::size_t>(v)], dist_sq(points, u, points, v));
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Gaussian-kernel mean over all index pairs (i, j), including i == j.
inline double kernel_mean(const Sample& a, const Sample& b, double sigma) {
  double s = 0.0;
  for (Index i = 0; i < a.n(); ++i)
    for (Index j = 0; j < b.n(); ++j) s += std::exp(-dist_sq(a, i, b, j) / (2.0 * sigma * sigma));
  return s / (static_cast<double>(a.n()) * static_cast<double>(b.n()));
}

/// Mean Euclidean distance over all index pairs.
inline double distance_mean(const Sample& a, const Sample& b) {
  double s = 0.0;
  for (Index i = 0; i < a.n(); ++i)
    for (Index j = 0; j < b.n(); ++j) s += std::sqrt(dist_sq(a, i, b, j));
  return s / (static_cast<double>(a.n()) * static_cast<double>(b.n()));
}

/// Rows of `s` in a random order.
inline Sample shuffled(const Sample& s, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(s.n()));
  for (Index i = 0; i < s.n(); ++i) idx[static_cast<std::size_t>(i)] = i;
  ite::Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  RowMatrix m(s.n(), s.d());
  for (Index i = 0; i < s.n(); ++i) m.row(i) = s.data().row(idx[static_cast<std::size_t>(i)]);
  return Sample(std::move(m));
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// 95th percentile of `statistic` recomputed after randomly permuting the rows
/// of the second block (permutation null of independence).
template <typename Stat>
double permutation_threshold(const Sample& x, const Sample& y, Stat&& statistic, int permutations,
                             std::uint64_t seed) {
  std::vector<double> null;
  for (int p = 0; p < permutations; ++p) null.push_back(statistic(x, shuffled(y, ite::derive_seed(seed, p))));
  std::sort(null.begin(), null.end());
  return null[static_cast<std::size_t>(std::ceil(0.95 * permutations)) - 1];
}

/// Empirical copula by direct counting: U_ij = (1 + #{k : x_kj < x_ij}) / (n + 1).
inline RowMatrix copula_by_count(const Sample& s) {
  RowMatrix u(s.n(), s.d());
  for (Index j = 0; j < s.d(); ++j)
    for (Index i = 0; i < s.n(); ++i) {
      Index less = 0;
      for (Index k = 0; k < s.n(); ++k) less += s.data()(k, j) < s.data()(i, j) ? 1 : 0;
      u(i, j) = static_cast<double>(less + 1) / (static_cast<double>(s.n()) + 1.0);
    }
  return u;
}

inline double spearman_oracle(const Sample& s, int variant) {
  const RowMatrix u = copula_by_count(s);
  const auto d = static_cast<double>(s.d());
  const auto n = static_cast<double>(s.n());
  const double two_d = std::pow(2.0, d);
  const double h = (d + 1.0) / (two_d - d - 1.0);
  double lower = 0.0, upper = 0.0;
  for (Index i = 0; i < s.n(); ++i) {
    double pl = 1.0, pu = 1.0;
    for (Index j = 0; j < s.d(); ++j) {
      pl *= 1.0 - u(i, j);
      pu *= u(i, j);
    }
    lower += pl;
    upper += pu;
  }
  const double r1 = h * (two_d / n * lower - 1.0);
  const double r2 = h * (two_d / n * upper - 1.0);
  return variant == 1 ? r1 : variant == 2 ? r2 : 0.5 * (r1 + r2);
}

inline double blomqvist_oracle(const Sample& s) {
  const RowMatrix u = copula_by_count(s);
  const auto d = static_cast<double>(s.d());
  const auto n = static_cast<double>(s.n());
  Index below = 0, above = 0;
  for (Index i = 0; i < s.n(); ++i) {
    bool b = true, a = true;
    for (Index j = 0; j < s.d(); ++j) {
      b = b && u(i, j) <= 0.5;
      a = a && u(i, j) > 0.5;
    }
    below += b;
    above += a;
  }
  const double half_pow = std::pow(2.0, d - 1.0);
  const double h = half_pow / (half_pow - 1.0);
  return h * (static_cast<double>(below) / n + static_cast<double>(above) / n - 1.0 / half_pow);
}

}  // namespace testing_support
