#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "ite/core/sample.hpp"
#include "ite/geometry/kdtree.hpp"
#include "ite/geometry/knn.hpp"

namespace ite::geometry {

/// MST edge; edges are totally ordered by (squared length, lower endpoint,
/// higher endpoint), which makes the tree unique even under distance ties.
struct Edge {
  double sq = std::numeric_limits<double>::infinity();
  Index a = -1;
  Index b = -1;

  friend bool operator<(const Edge& x, const Edge& y) noexcept {
    return std::tie(x.sq, x.a, x.b) < std::tie(y.sq, y.a, y.b);
  }
};

inline Edge make_edge(double sq, Index i, Index j) noexcept {
  return i < j ? Edge{sq, i, j} : Edge{sq, j, i};
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<Index> parent_;
};

/// Boruvka rounds where each component's cheapest outgoing edge is found with
/// a kd-tree search that skips subtrees lying entirely inside the component.
inline std::vector<Edge> boruvka_kdtree(const RowMatrix& points) {
  const Index n = points.rows();
  const KdTree tree(points);
  const auto& nodes = tree.nodes();
  const auto& order = tree.order();
  DisjointSets sets(n);
  std::vector<Index> comp(static_cast<std::size_t>(n));
  std::vector<Index> node_comp(nodes.size());
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));

  while (static_cast<Index>(edges.size()) < n - 1) {
    for (Index i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = sets.find(i);
    // Children are created after their parent, so a reverse sweep is bottom-up.
    for (std::size_t id = nodes.size(); id-- > 0;) {
      const auto& node = nodes[id];
      if (node.leaf()) {
        Index c = comp[static_cast<std::size_t>(order[static_cast<std::size_t>(node.begin)])];
        for (Index i = node.begin + 1; i < node.end && c >= 0; ++i) {
          if (comp[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] != c) c = -1;
        }
        node_comp[id] = c;
      } else {
        const Index l = node_comp[static_cast<std::size_t>(node.left)];
        const Index r = node_comp[static_cast<std::size_t>(node.right)];
        node_comp[id] = (l >= 0 && l == r) ? l : -1;
      }
    }

    std::vector<Edge> best(static_cast<std::size_t>(n));
    std::vector<Index> stack;
    for (Index i = 0; i < n; ++i) {
      const Index c = comp[static_cast<std::size_t>(i)];
      Edge& cb = best[static_cast<std::size_t>(c)];
      const double* q = tree.point(i);
      stack.assign(1, 0);
      while (!stack.empty()) {
        const Index id = stack.back();
        stack.pop_back();
        if (node_comp[static_cast<std::size_t>(id)] == c) continue;
        if (tree.box_distance(id, q) > cb.sq) continue;
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.leaf()) {
          for (Index p = node.begin; p < node.end; ++p) {
            const Index j = order[static_cast<std::size_t>(p)];
            if (comp[static_cast<std::size_t>(j)] == c) continue;
            const Edge e = make_edge(squared_distance(q, tree.point(j), tree.dim()), i, j);
            if (e < cb) cb = e;
          }
        } else {
          const double dl = tree.box_distance(node.left, q);
          const double dr = tree.box_distance(node.right, q);
          // Push the farther child first so the nearer one is explored first.
          if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
          } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
          }
        }
      }
    }

    std::vector<Edge> round;
    for (Index c = 0; c < n; ++c) {
      if (comp[static_cast<std::size_t>(c)] == c && best[static_cast<std::size_t>(c)].a >= 0)
        round.push_back(best[static_cast<std::size_t>(c)]);
    }
    std::sort(round.begin(), round.end());
    for (const Edge& e : round) {
      if (sets.unite(e.a, e.b)) edges.push_back(e);
    }
  }
  return edges;
}

/// O(n^2) Prim on implicit complete graph; used above the kd-tree dimension cap.
inline std::vector<Edge> prim_dense(const RowMatrix& points) {
  const Index n = points.rows();
  const Index d = points.cols();
  std::vector<Edge> link(static_cast<std::size_t>(n));
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));
  Index current = 0;
  in_tree[0] = 1;
  for (Index step = 1; step < n; ++step) {
    Index next = -1;
    for (Index v = 0; v < n; ++v) {
      if (in_tree[static_cast<std::size_t>(v)]) continue;
      const Edge e = make_edge(
          squared_distance(points.data() + current * d, points.data() + v * d, d), current, v);
      Edge& l = link[static_cast<std::size_t>(v)];
      if (e < l) l = e;
      if (next < 0 || l < link[static_cast<std::size_t>(next)]) next = v;
    }
    edges.push_back(link[static_cast<std::size_t>(next)]);
    in_tree[static_cast<std::size_t>(next)] = 1;
    current = next;
  }
  return edges;
}

}  // namespace detail

/// Edges of the Euclidean minimum spanning tree, sorted by edge order.
inline std::vector<Edge> euclidean_mst(const Sample& points) {
  ite::detail::require(points.n() >= 2, ErrorCode::TooFewPoints,
                       "minimum spanning tree needs at least 2 points");
  auto edges = points.d() <= kKdTreeMaxDim ? detail::boruvka_kdtree(points.data())
                                           : detail::prim_dense(points.data());
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Sum of |e|^gamma over the Euclidean minimum spanning tree.
inline double euclidean_mst_weight(const Sample& points, double gamma) {
  ite::detail::require(gamma > 0.0 && std::isfinite(gamma), ErrorCode::DomainError,
                       "edge exponent must be positive, got " + std::to_string(gamma));
  double total = 0.0;
  for (const Edge& e : euclidean_mst(points)) total += std::pow(std::sqrt(e.sq), gamma);
  return total;
}

}  // namespace ite::geometry
