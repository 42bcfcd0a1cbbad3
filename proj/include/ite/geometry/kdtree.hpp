#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "ite/core/sample.hpp"

namespace ite::geometry {

/// Candidate neighbor, ordered by (squared distance, point index).
struct Neighbor {
  double sq = std::numeric_limits<double>::infinity();
  Index index = -1;

  friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
    return a.sq < b.sq || (a.sq == b.sq && a.index < b.index);
  }
};

/// Static kd-tree over the rows of a row-major matrix. The matrix must outlive
/// the tree. Nodes keep tight bounding boxes; splits are on the widest box
/// dimension at the median.
class KdTree {
 public:
  struct Node {
    Index begin = 0;
    Index end = 0;
    Index left = -1;
    Index right = -1;
    bool leaf() const noexcept { return left < 0; }
  };

  explicit KdTree(const RowMatrix& points, Index leaf_size = 10)
      : points_(&points), d_(points.cols()), leaf_size_(std::max<Index>(1, leaf_size)) {
    order_.resize(static_cast<std::size_t>(points.rows()));
    std::iota(order_.begin(), order_.end(), Index{0});
    nodes_.reserve(static_cast<std::size_t>(2 * points.rows() / leaf_size_ + 2));
    if (points.rows() > 0) build(0, points.rows());
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Index>& order() const noexcept { return order_; }
  const double* point(Index i) const noexcept { return points_->data() + i * d_; }
  Index dim() const noexcept { return d_; }

  /// Squared distance from q to the bounding box of node `node`.
  double box_distance(Index node, const double* q) const noexcept {
    const double* lo = &lo_[static_cast<std::size_t>(node * d_)];
    const double* hi = &hi_[static_cast<std::size_t>(node * d_)];
    double s = 0.0;
    for (Index t = 0; t < d_; ++t) {
      double diff = 0.0;
      if (q[t] < lo[t]) {
        diff = lo[t] - q[t];
      } else if (q[t] > hi[t]) {
        diff = q[t] - hi[t];
      }
      s += diff * diff;
    }
    return s;
  }

  /// The k nearest points to q (excluding index `exclude`, -1 for none),
  /// written to `out` in ascending (distance, index) order.
  void knn(const double* q, Index k, Index exclude, std::vector<Neighbor>& out) const {
    out.clear();
    if (nodes_.empty() || k <= 0) return;
    // Max-heap on Neighbor order; top is the current worst.
    knn_node(0, q, k, exclude, out);
    std::sort_heap(out.begin(), out.end());
  }

 private:
  Index build(Index begin, Index end) {
    const Index id = static_cast<Index>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    lo_.resize(static_cast<std::size_t>((id + 1) * d_));
    hi_.resize(static_cast<std::size_t>((id + 1) * d_));
    double* lo = &lo_[static_cast<std::size_t>(id * d_)];
    double* hi = &hi_[static_cast<std::size_t>(id * d_)];
    std::fill(lo, lo + d_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + d_, -std::numeric_limits<double>::infinity());
    for (Index i = begin; i < end; ++i) {
      const double* p = point(order_[static_cast<std::size_t>(i)]);
      for (Index t = 0; t < d_; ++t) {
        lo[t] = std::min(lo[t], p[t]);
        hi[t] = std::max(hi[t], p[t]);
      }
    }
    if (end - begin <= leaf_size_) return id;

    Index split = 0;
    double spread = -1.0;
    for (Index t = 0; t < d_; ++t) {
      if (hi[t] - lo[t] > spread) {
        spread = hi[t] - lo[t];
        split = t;
      }
    }
    if (spread <= 0.0) return id;  // all points coincide

    const Index mid = begin + (end - begin) / 2;
    auto first = order_.begin() + begin;
    std::nth_element(first, order_.begin() + mid, order_.begin() + end, [&](Index a, Index b) {
      const double va = point(a)[split];
      const double vb = point(b)[split];
      return va < vb || (va == vb && a < b);
    });
    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  void knn_node(Index node_id, const double* q, Index k, Index exclude,
                std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.leaf()) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Index idx = order_[static_cast<std::size_t>(i)];
        if (idx == exclude) continue;
        const Neighbor cand{squared_distance(q, point(idx), d_), idx};
        if (static_cast<Index>(heap.size()) < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const double dl = box_distance(node.left, q);
    const double dr = box_distance(node.right, q);
    const Index near = dl <= dr ? node.left : node.right;
    const Index far = dl <= dr ? node.right : node.left;
    const double dnear = std::min(dl, dr);
    const double dfar = std::max(dl, dr);
    auto worst = [&] {
      return static_cast<Index>(heap.size()) < k ? std::numeric_limits<double>::infinity()
                                                 : heap.front().sq;
    };
    // `<=` keeps equal-distance candidates reachable so index tie-breaks are exact.
    if (dnear <= worst()) knn_node(near, q, k, exclude, heap);
    if (dfar <= worst()) knn_node(far, q, k, exclude, heap);
  }

  const RowMatrix* points_;
  Index d_;
  Index leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

}  // namespace ite::geometry
