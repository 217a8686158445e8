#include "embalign/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "embalign/error.hpp"

namespace embalign {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw NumericError("matrix data size " + std::to_string(data_.size()) +
                       " does not match shape " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix multiply(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw NumericError("cannot multiply " + shape_string(lhs) + " by " + shape_string(rhs));
  }
  Matrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double l = lhs(i, k);
      const auto r = rhs.row(k);
      for (std::size_t j = 0; j < rhs.cols(); ++j) out_row[j] += l * r[j];
    }
  }
  return out;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) { return multiply(lhs, rhs); }

Matrix operator-(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw NumericError("cannot subtract " + shape_string(rhs) + " from " + shape_string(lhs));
  }
  Matrix out = lhs;
  auto o = out.data();
  const auto r = rhs.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= r[i];
  return out;
}

Matrix operator*(double scalar, const Matrix& m) {
  Matrix out = m;
  for (double& v : out.data()) v *= scalar;
  return out;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(squared_norm(m.data())); }

double max_abs_difference(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw NumericError("cannot compare " + shape_string(lhs) + " with " + shape_string(rhs));
  }
  double worst = 0.0;
  const auto l = lhs.data();
  const auto r = rhs.data();
  for (std::size_t i = 0; i < l.size(); ++i) worst = std::max(worst, std::abs(l[i] - r[i]));
  return worst;
}

double orthogonality_error(const Matrix& m) {
  return frobenius_norm(m.transposed() * m - Matrix::identity(m.cols()));
}

double determinant(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw NumericError("determinant of non-square " + shape_string(m));
  }
  const std::size_t d = m.rows();
  Matrix lu = m;
  double det = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      std::swap_ranges(lu.row(col).begin(), lu.row(col).end(), lu.row(pivot).begin());
      det = -det;
    }
    const double p = lu(col, col);
    det *= p;
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = lu(r, col) / p;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < d; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_norm(std::span<const double> x) noexcept { return dot(x, x); }

}  // namespace embalign
