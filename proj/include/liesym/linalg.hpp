#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/rational.hpp"

namespace liesym {

/// Small dense matrix, row-major.
template <typename T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) = out(i, j) + a(i, k) * b(k, j);
      }
    return out;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
    return out;
  }

  Matrix scaled(const T& k) const {
    Matrix out = *this;
    for (auto& v : out.data_) v = v * k;
    return out;
  }

  [[nodiscard]] bool is_zero() const {
    for (const auto& v : data_)
      if (!(v == T(0))) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Cofactor expansion along the first row; meant for small matrices.
template <typename T>
T determinant(const Matrix<T>& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return T(1);
  if (n == 1) return m(0, 0);
  T out(0);
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c) == T(0)) continue;
    Matrix<T> minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = m(i, j);
    T term = m(0, c) * determinant(minor);
    out = c % 2 == 0 ? out + term : out - term;
  }
  return out;
}

using RationalMatrix = Matrix<Rational>;
using ExprMatrix = Matrix<Expr>;

/// Solves a x = b exactly. Free variables are set to zero; returns nullopt when
/// the system is inconsistent.
std::optional<std::vector<Rational>> solve_linear(RationalMatrix a, std::vector<Rational> b);

ExprMatrix to_expr(const RationalMatrix& m);
ExprMatrix substitute(const ExprMatrix& m, const Bindings& b);
Matrix<double> evaluate(const ExprMatrix& m, const Assignment& a);

class SeriesError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// exp(s A) summed in closed form when A is nilpotent or satisfies
/// A^3 = -w^2 A (rotation generator, w rational). Throws SeriesError otherwise.
ExprMatrix exp_closed_form(const RationalMatrix& a, const Expr& s, std::size_t max_terms = 12);

/// integral_0^s exp(r A) dr in closed form under the same conditions.
ExprMatrix integral_exp_closed_form(const RationalMatrix& a, const Expr& s, std::size_t max_terms = 12);

}  // namespace liesym
