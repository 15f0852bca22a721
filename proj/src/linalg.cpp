#include "liesym/linalg.hpp"

namespace liesym {

std::optional<std::vector<Rational>> solve_linear(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(p, j), a(r, j));
      std::swap(b[p], b[r]);
    }
    Rational inv = Rational(1) / a(r, c);
    for (std::size_t j = 0; j < cols; ++j) a(r, j) *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      Rational k = a(i, c);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) -= k * a(r, j);
      b[i] -= k * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (!b[i].is_zero()) return std::nullopt;
  std::vector<Rational> x(cols);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
  return x;
}

ExprMatrix to_expr(const RationalMatrix& m) {
  ExprMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Expr(m(i, j));
  return out;
}

ExprMatrix substitute(const ExprMatrix& m, const Bindings& b) {
  ExprMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = substitute_simultaneous(m(i, j), b);
  return out;
}

Matrix<double> evaluate(const ExprMatrix& m, const Assignment& a) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = eval_numeric(m(i, j), a);
  return out;
}

namespace {

struct Pattern {
  enum class Kind { Nilpotent, Rotation } kind;
  std::size_t nil_index = 0;  // smallest n with A^n = 0
  Rational omega;             // A^3 = -omega^2 A
  RationalMatrix a2;
};

Pattern classify(const RationalMatrix& a, std::size_t max_terms) {
  const std::size_t n = a.rows();
  RationalMatrix p = RationalMatrix::identity(n);
  for (std::size_t k = 1; k <= max_terms; ++k) {
    p = p * a;
    if (p.is_zero()) return Pattern{Pattern::Kind::Nilpotent, k, Rational(0), {}};
  }
  RationalMatrix a2 = a * a;
  RationalMatrix a3 = a2 * a;
  // Find w^2 with A^3 = -w^2 A from the first non-zero entry of A.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j).is_zero()) continue;
      Rational w2 = -(a3(i, j) / a(i, j));
      if (w2.sign() <= 0 || !(a3 == a.scaled(-w2))) {
        throw SeriesError("adjoint series neither terminates nor matches the rotation pattern");
      }
      auto w = w2.exact_pow(Rational(1, 2));
      if (!w) throw SeriesError("rotation frequency is irrational");
      return Pattern{Pattern::Kind::Rotation, 0, *w, a2};
    }
  }
  throw SeriesError("unreachable: zero matrix is nilpotent");
}

Rational factorial(std::size_t k) {
  Rational r(1);
  for (std::size_t i = 2; i <= k; ++i) r *= Rational(static_cast<std::int64_t>(i));
  return r;
}

}  // namespace

ExprMatrix exp_closed_form(const RationalMatrix& a, const Expr& s, std::size_t max_terms) {
  const std::size_t n = a.rows();
  Pattern pat = classify(a, max_terms);
  if (pat.kind == Pattern::Kind::Nilpotent) {
    ExprMatrix out = to_expr(RationalMatrix::identity(n));
    RationalMatrix p = RationalMatrix::identity(n);
    Expr sk(1);
    for (std::size_t k = 1; k < pat.nil_index; ++k) {
      p = p * a;
      sk = sk * s;
      out = out + to_expr(p).scaled(sk * Expr(Rational(1) / factorial(k)));
    }
    return out;
  }
  const Rational& w = pat.omega;
  Expr ws = Expr(w) * s;
  Expr c1 = sin(ws) * Expr(Rational(1) / w);
  Expr c2 = (Expr(1) - cos(ws)) * Expr(Rational(1) / (w * w));
  return to_expr(RationalMatrix::identity(n)) + to_expr(a).scaled(c1) + to_expr(pat.a2).scaled(c2);
}

ExprMatrix integral_exp_closed_form(const RationalMatrix& a, const Expr& s, std::size_t max_terms) {
  const std::size_t n = a.rows();
  Pattern pat = classify(a, max_terms);
  if (pat.kind == Pattern::Kind::Nilpotent) {
    ExprMatrix out = to_expr(RationalMatrix::identity(n)).scaled(s);
    RationalMatrix p = RationalMatrix::identity(n);
    Expr sk = s;
    for (std::size_t k = 1; k < pat.nil_index; ++k) {
      p = p * a;
      sk = sk * s;
      out = out + to_expr(p).scaled(sk * Expr(Rational(1) / factorial(k + 1)));
    }
    return out;
  }
  const Rational& w = pat.omega;
  Expr ws = Expr(w) * s;
  Rational w2 = w * w;
  Expr c1 = (Expr(1) - cos(ws)) * Expr(Rational(1) / w2);
  Expr c2 = s * Expr(Rational(1) / w2) - sin(ws) * Expr(Rational(1) / (w2 * w));
  return to_expr(RationalMatrix::identity(n)).scaled(s) + to_expr(a).scaled(c1) + to_expr(pat.a2).scaled(c2);
}

}  // namespace liesym
