#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ite/core/error.hpp"

namespace ite {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// N x d block of i.i.d. observations, one observation per row. Construction
/// rejects empty or non-finite data, so every estimator can assume a valid
/// sample.
class Sample {
 public:
  Sample() = default;

  explicit Sample(RowMatrix data) : data_(std::move(data)) {
    ite::detail::require(data_.rows() >= 1 && data_.cols() >= 1, ErrorCode::InvalidInput,
                    "sample must have at least one row and one column");
    ite::detail::require(data_.allFinite(), ErrorCode::NonFiniteInput, "sample contains NaN or Inf");
  }

  template <typename Derived>
  static Sample from(const Eigen::MatrixBase<Derived>& m) {
    return Sample(RowMatrix(m));
  }

  static Sample from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const Index n = static_cast<Index>(rows.size());
    const Index d = n > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
    RowMatrix m(n, d);
    Index i = 0;
    for (const auto& row : rows) {
      ite::detail::require(static_cast<Index>(row.size()) == d, ErrorCode::InvalidInput, "ragged rows");
      Index j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return Sample(std::move(m));
  }

  /// One-dimensional sample from a list of values.
  static Sample column(std::span<const double> values) {
    RowMatrix m(static_cast<Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Index>(i), 0) = values[i];
    return Sample(std::move(m));
  }
  static Sample column(std::initializer_list<double> values) {
    return column(std::span<const double>(values.begin(), values.size()));
  }

  Index n() const noexcept { return data_.rows(); }
  Index d() const noexcept { return data_.cols(); }
  bool empty() const noexcept { return data_.size() == 0; }

  const RowMatrix& data() const noexcept { return data_; }
  const double* row(Index i) const noexcept { return data_.data() + i * data_.cols(); }

  /// Columns [first, first + count) as a new sample.
  Sample columns(Index first, Index count) const {
    ite::detail::require(first >= 0 && count >= 1 && first + count <= d(), ErrorCode::BlockError,
                    "column range out of bounds");
    return Sample(RowMatrix(data_.middleCols(first, count)));
  }

  /// Columns listed in `indices`, in that order.
  Sample select_columns(std::span<const Index> indices) const {
    RowMatrix m(n(), static_cast<Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
      ite::detail::require(indices[j] >= 0 && indices[j] < d(), ErrorCode::BlockError,
                      "column index out of bounds");
      m.col(static_cast<Index>(j)) = data_.col(indices[j]);
    }
    return Sample(std::move(m));
  }

  Sample scaled(double a) const { return Sample(RowMatrix(data_ * a)); }

  friend bool operator==(const Sample& a, const Sample& b) {
    return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
           a.data_ == b.data_;
  }

 private:
  RowMatrix data_;
};

/// Horizontal concatenation of samples that share the observation count.
inline Sample hstack(std::span<const Sample> blocks) {
  ite::detail::require(!blocks.empty(), ErrorCode::BlockError, "no blocks to concatenate");
  const Index n = blocks.front().n();
  Index total = 0;
  for (const auto& b : blocks) {
    ite::detail::require(b.n() == n, ErrorCode::BlockError, "blocks have different observation counts");
    total += b.d();
  }
  RowMatrix m(n, total);
  Index col = 0;
  for (const auto& b : blocks) {
    m.middleCols(col, b.d()) = b.data();
    col += b.d();
  }
  return Sample(std::move(m));
}

inline void require_same_dim(const Sample& x, const Sample& y) {
  ite::detail::require(x.d() == y.d(), ErrorCode::DimensionMismatch,
                  "samples have dimensions " + std::to_string(x.d()) + " and " +
                      std::to_string(y.d()));
}

/// Squared Euclidean distance between two rows of length d. Every distance in
/// the library goes through this loop so that independent routes agree bitwise.
inline double squared_distance(const double* a, const double* b, Index d) noexcept {
  double s = 0.0;
  for (Index t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

}  // namespace ite
