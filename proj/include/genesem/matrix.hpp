#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "genesem/error.hpp"

namespace genesem {

/// Row-major real matrix. Rows are genes, columns are features.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
      throw Error(ErrorCode::ShapeMismatch, "value count does not match rows x cols");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    assert(r < rows_ && c < cols_);
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    assert(r < rows_ && c < cols_);
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

/// n x n matrix of squared Euclidean distances between rows.
inline DenseMatrix pairwise_squared_distances(const DenseMatrix& points) {
  const std::size_t n = points.rows();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = squared_distance(points.row(i), points.row(j));
      out(i, j) = d;
      out(j, i) = d;
    }
  return out;
}

inline DenseMatrix pairwise_distances(const DenseMatrix& points) {
  DenseMatrix out = pairwise_squared_distances(points);
  for (double& v : out.values()) v = std::sqrt(v);
  return out;
}

/// Column-wise concatenation; all blocks must share the row count.
inline DenseMatrix hconcat(std::span<const DenseMatrix* const> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front()->rows();
  std::size_t cols = 0;
  for (const DenseMatrix* b : blocks) {
    if (b->rows() != rows)
      throw Error(ErrorCode::ShapeMismatch, "blocks have differing row counts");
    cols += b->cols();
  }
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t offset = 0;
    for (const DenseMatrix* b : blocks) {
      const auto src = b->row(r);
      for (std::size_t c = 0; c < src.size(); ++c) out(r, offset + c) = src[c];
      offset += b->cols();
    }
  }
  return out;
}

}  // namespace genesem
