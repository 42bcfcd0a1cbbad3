#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ite/core/parallel.hpp"
#include "ite/core/sample.hpp"
#include "ite/geometry/kdtree.hpp"

namespace ite::geometry {

/// Sorted Euclidean distances from each query to its k nearest points.
struct NeighborTable {
  RowMatrix dists;  // queries x k, rows nondecreasing
  Index k = 0;
  bool self_excluded = false;

  /// Distance to the k-th neighbor for every query (last column).
  Vector kth() const { return dists.col(k - 1); }
};

/// Above this dimension kd-tree pruning rarely pays off; queries scan all points.
inline constexpr Index kKdTreeMaxDim = 20;

namespace detail {

inline void brute_knn(const RowMatrix& points, const double* q, Index k, Index exclude,
                      std::vector<Neighbor>& heap) {
  heap.clear();
  const Index d = points.cols();
  for (Index i = 0; i < points.rows(); ++i) {
    if (i == exclude) continue;
    const Neighbor cand{squared_distance(q, points.data() + i * d, d), i};
    if (static_cast<Index>(heap.size()) < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end());
    }
  }
  std::sort_heap(heap.begin(), heap.end());
}

inline void check_knn_args(const Sample& points, const Sample& queries, Index k,
                           bool self_excluded) {
  require_same_dim(points, queries);
  ite::detail::require(k >= 1, ErrorCode::KTooLarge, "k must be positive");
  if (self_excluded) {
    ite::detail::require(queries.n() == points.n(), ErrorCode::DimensionMismatch,
                         "self-excluded search needs queries identical to points");
    ite::detail::require(k <= points.n() - 1, ErrorCode::KTooLarge,
                         "k=" + std::to_string(k) + " needs at least " + std::to_string(k + 1) +
                             " points, got " + std::to_string(points.n()));
  } else {
    ite::detail::require(k <= points.n(), ErrorCode::KTooLarge,
                         "k=" + std::to_string(k) + " exceeds point count " +
                             std::to_string(points.n()));
  }
}

}  // namespace detail

/// Exact k-nearest-neighbor distances. With `self_excluded`, `queries` must be
/// the point set itself and query i never matches point i (duplicates of it
/// still count, at distance 0). Ties are broken by lower point index.
inline NeighborTable knn_distances(const Sample& points, const Sample& queries, Index k,
                                   bool self_excluded) {
  detail::check_knn_args(points, queries, k, self_excluded);
  NeighborTable table;
  table.k = k;
  table.self_excluded = self_excluded;
  table.dists.resize(queries.n(), k);

  std::optional<KdTree> tree;
  if (points.d() <= kKdTreeMaxDim) tree.emplace(points.data());

  const auto nq = static_cast<std::size_t>(queries.n());
  const std::size_t workers = std::max<std::size_t>(1, thread_count());
  const std::size_t block = (nq + workers - 1) / workers;
  // One block per worker, each with its own scratch heap.
  parallel_for(
      0, workers,
      [&](std::size_t w) {
        std::vector<Neighbor> heap;
        heap.reserve(static_cast<std::size_t>(k) + 1);
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(nq, lo + block);
        for (std::size_t qi = lo; qi < hi; ++qi) {
          const auto q = static_cast<Index>(qi);
          const Index exclude = self_excluded ? q : -1;
          if (tree) {
            tree->knn(queries.row(q), k, exclude, heap);
          } else {
            detail::brute_knn(points.data(), queries.row(q), k, exclude, heap);
          }
          for (Index j = 0; j < k; ++j) table.dists(q, j) = std::sqrt(heap[static_cast<std::size_t>(j)].sq);
        }
      },
      1);
  return table;
}

/// Self-excluded neighbor table of a point set.
inline NeighborTable knn_distances(const Sample& points, Index k) {
  return knn_distances(points, points, k, true);
}

}  // namespace ite::geometry
