#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ite/core/sample.hpp"

namespace ite::geometry {

/// Empirical copula transform: every column is replaced by its ranks divided
/// by n + 1, tied values sharing their average rank.
inline Sample rank_transform(const Sample& sample) {
  const Index n = sample.n();
  RowMatrix out(n, sample.d());
  std::vector<Index> idx(static_cast<std::size_t>(n));
  const double denom = static_cast<double>(n) + 1.0;
  for (Index c = 0; c < sample.d(); ++c) {
    const auto col = sample.data().col(c);
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return col(a) < col(b); });
    Index i = 0;
    while (i < n) {
      Index j = i + 1;
      while (j < n && col(idx[static_cast<std::size_t>(j)]) == col(idx[static_cast<std::size_t>(i)])) ++j;
      // positions i..j-1 hold ranks i+1..j
      const double rank = 0.5 * static_cast<double>(i + 1 + j);
      for (Index t = i; t < j; ++t) out(idx[static_cast<std::size_t>(t)], c) = rank / denom;
      i = j;
    }
  }
  return Sample(std::move(out));
}

}  // namespace ite::geometry
