#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace battlemix {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Lower Cholesky factor L with A = L·Lᵀ. Throws NotPositiveDefinite.
Matrix cholesky(const Matrix& a);

/// Solves L·y = b in place for lower-triangular L.
void forward_substitute(const Matrix& lower, std::span<double> b);

/// Biased (1/M) column covariance and mean of a data matrix.
Matrix covariance(const Matrix& data, std::vector<double>* mean_out = nullptr);

}  // namespace battlemix
