#include "battlemix/matrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "battlemix/error.hpp"
#include "battlemix/simd/kernels.hpp"

namespace battlemix {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "cholesky of non-square matrix");
  const Eigen::Map<const RowMajor> view(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                                        static_cast<Eigen::Index>(a.cols()));
  const Eigen::LLT<RowMajor> llt(view);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  }
  Matrix out(a.rows(), a.cols());
  Eigen::Map<RowMajor> dst(out.data().data(), static_cast<Eigen::Index>(a.rows()),
                           static_cast<Eigen::Index>(a.cols()));
  dst = llt.matrixL();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (!(out(i, i) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "zero pivot");
  }
  return out;
}

void forward_substitute(const Matrix& lower, std::span<double> b) {
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < lower.rows(); ++i) {
    const double s = k.dot(lower.row(i).data(), b.data(), i);
    b[i] = (b[i] - s) / lower(i, i);
  }
}

Matrix covariance(const Matrix& data, std::vector<double>* mean_out) {
  const std::size_t m = data.rows();
  const std::size_t n = data.cols();
  std::vector<double> mean(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) mean[d] += data(i, d);
  }
  for (auto& v : mean) v /= static_cast<double>(m);
  Matrix cov(n, n);
  const auto& k = simd::kernels();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) diff[d] = data(i, d) - mean[d];
    for (std::size_t a = 0; a < n; ++a) k.axpy(diff[a], diff.data(), cov.row(a).data(), n);
  }
  for (auto& v : cov.data()) v /= static_cast<double>(m);
  if (mean_out) *mean_out = std::move(mean);
  return cov;
}

}  // namespace battlemix
