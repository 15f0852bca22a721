#include "liesym/adjoint.hpp"

#include <algorithm>
#include <cmath>

namespace liesym {

namespace {

Symbol basis_symbol(std::size_t k) { return Symbol::parameter("X" + std::to_string(k + 1)); }

Assignment at_s(double s) {
  Assignment a;
  a.values[adjoint_parameter().name()] = s;
  return a;
}

bool same(const Expr& a, const Expr& b) { return a == b || equals(a, b); }

}  // namespace

Symbol adjoint_parameter() { return Symbol::parameter("s"); }

Matrix<double> AdjointMatrix::at(double s) const { return evaluate(m, at_s(s)); }

ExprMatrix AdjointMatrix::at(const Expr& s) const { return substitute(m, Bindings{{adjoint_parameter(), s}}); }

AdjointMatrix adjoint_matrix(const StructureConstants& sc, std::size_t t) {
  const std::size_t n = sc.dim();
  if (t < 1 || t > n) throw std::out_of_range("generator index out of range: " + std::to_string(t));
  // ad_{X_t} on coordinates: column r holds [X_t, X_r].
  RationalMatrix neg_ad(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) neg_ad(k, r) = -sc(t - 1, r, k);
  return AdjointMatrix{t, exp_closed_form(neg_ad, Expr(adjoint_parameter()))};
}

AdjointTable adjoint_table(const StructureConstants& sc) {
  if (sc.dim() != 5) throw std::invalid_argument("adjoint table expects a five-dimensional algebra");
  AdjointTable out;
  for (std::size_t t = 0; t < 5; ++t) {
    AdjointMatrix m = adjoint_matrix(sc, t + 1);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t k = 0; k < 5; ++k) out[t][r][k] = m.m(k, r);
  }
  return out;
}

std::string combination_str(const std::array<Expr, 5>& coords) {
  std::string out;
  for (std::size_t k = 0; k < 5; ++k) {
    const Expr& c = coords[k];
    if (c.is_zero()) continue;
    const std::string x = "X" + std::to_string(k + 1);
    bool negative = c.terms().size() == 1 && c.terms()[0].coeff.is_negative();
    Expr mag = negative ? -c : c;
    std::string body;
    if (mag == Expr(1)) {
      body = x;
    } else if (mag.terms().size() == 1) {
      body = mag.str() + "*" + x;
    } else {
      body = "(" + mag.str() + ")*" + x;
    }
    if (out.empty()) {
      out = negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out.empty() ? "0" : out;
}

const std::array<std::array<std::string, 5>, 5>& printed_adjoint_table() {
  static const std::array<std::array<std::string, 5>, 5> table{{
      {"X1", "X2 - s*X4", "X3", "X4", "X5"},
      {"X1 + s*X4", "X2", "X3", "X4", "X5"},
      {"X1", "X2", "X3", "X4", "X5"},
      {"cos(s)*X1 - sin(s)*X2", "sin(s)*X1 + cos(s)*X2", "X3", "X4", "X5"},
      {"X1", "X2", "X3", "X4", "X5"},
  }};
  return table;
}

std::array<Expr, 5> parse_combination(std::string_view text) {
  SymbolTable table = SymbolTable::standard();
  for (std::size_t k = 0; k < 5; ++k) table.declare(basis_symbol(k));
  Expr e = parse(text, table);
  std::array<Expr, 5> out;
  Expr rest = e;
  for (std::size_t k = 0; k < 5; ++k) {
    Symbol xk = basis_symbol(k);
    out[k] = partial(e, xk);
    rest = rest - out[k] * Expr(xk);
  }
  for (const auto& c : out) {
    for (std::size_t k = 0; k < 5; ++k)
      if (depends_on(c, basis_symbol(k))) throw std::invalid_argument("not linear in X1..X5: " + std::string(text));
  }
  if (!rest.is_zero()) throw std::invalid_argument("not a combination of X1..X5: " + std::string(text));
  return out;
}

std::vector<AdjointAuditCell> audit_adjoint_table(const StructureConstants& sc) {
  AdjointTable derived = adjoint_table(sc);
  const auto& printed = printed_adjoint_table();
  std::vector<AdjointAuditCell> out;
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t r = 0; r < 5; ++r) {
      std::array<Expr, 5> ref = parse_combination(printed[t][r]);
      bool match = true;
      for (std::size_t k = 0; k < 5; ++k) match = match && same(derived[t][r][k], ref[k]);
      out.push_back({t + 1, r + 1, combination_str(derived[t][r]), printed[t][r], match});
    }
  }
  return out;
}

std::vector<MatrixAuditEntry> audit_adjoint_matrix(const AdjointMatrix& m) {
  const auto& row_images = printed_adjoint_table().at(m.t - 1);
  std::vector<MatrixAuditEntry> out;
  for (std::size_t r = 0; r < 5; ++r) {
    std::array<Expr, 5> image = parse_combination(row_images[r]);
    // Published row r is the image of X_r, i.e. our column r.
    for (std::size_t k = 0; k < 5; ++k) {
      const Expr& d = m.m(k, r);
      out.push_back({k + 1, r + 1, d.str(), image[k].str(), same(d, image[k])});
    }
  }
  return out;
}

AdjointRepresentation::AdjointRepresentation(const StructureConstants& sc) : sc_(sc) {
  for (std::size_t t = 1; t <= sc.dim(); ++t) matrices_.push_back(adjoint_matrix(sc, t));
}

const AdjointRepresentation& AdjointRepresentation::standard() {
  static const AdjointRepresentation rep = [] {
    auto basis = standard_basis();
    return AdjointRepresentation(commutator_table(basis));
  }();
  return rep;
}

CoeffVector AdjointRepresentation::apply(const std::vector<AdjointStep>& word, const CoeffVector& v) const {
  CoeffVector cur = v;
  for (const auto& step : word) {
    if (!std::isfinite(step.s)) throw std::invalid_argument("adjoint parameter must be finite");
    if (step.t < 1 || step.t > matrices_.size()) throw std::out_of_range("generator index out of range");
    Matrix<double> m = matrices_[step.t - 1].at(step.s);
    CoeffVector next{};
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t r = 0; r < 5; ++r) next[k] += m(k, r) * cur[r];
    cur = next;
  }
  return cur;
}

CoeffVector apply_adjoint(const std::vector<AdjointStep>& word, const CoeffVector& v) {
  return AdjointRepresentation::standard().apply(word, v);
}

std::string OptimalClass::label() const {
  return std::to_string(class_id) + (variant_b ? "b" : "");
}

Normalization normalize(const CoeffVector& v) {
  for (double a : v)
    if (!std::isfinite(a)) throw std::invalid_argument("coefficients must be finite");
  const auto [a1, a2, a3, a4, a5] = v;
  Normalization n;
  auto step = [&](std::size_t t, double s) {
    if (s != 0.0) n.word.push_back({t, s});
  };
  OptimalClass& c = n.cls;
  if (a4 != 0.0) {
    // Ad(exp(s X2)) shifts a1 by -s a4, Ad(exp(s X1)) shifts a2 by +s a4.
    step(2, a1 / a4);
    step(1, -a2 / a4);
    n.scale = 1.0 / a4;
    c.class_id = 3;
    c.c1 = a3 / a4;
    c.c2 = a5 / a4;
    c.representative = {0, 0, c.c1, 1, c.c2};
  } else if (a2 != 0.0) {
    double r = std::hypot(a1, a2);
    step(4, -std::atan2(a1, a2));
    n.scale = 1.0 / r;
    c.class_id = 2;
    c.c1 = a3 / r;
    c.c2 = a5 / r;
    c.representative = {0, 1, c.c1, 0, c.c2};
  } else if (a1 != 0.0) {
    n.scale = 1.0 / a1;
    c.class_id = 1;
    c.c1 = a3 / a1;
    c.c2 = a5 / a1;
    c.representative = {1, 0, c.c1, 0, c.c2};
  } else if (a3 != 0.0) {
    n.scale = 1.0 / a3;
    c.class_id = 4;
    c.c1 = a5 / a3;
    c.representative = {0, 0, 1, 0, c.c1};
  } else if (a5 != 0.0) {
    n.scale = 1.0 / a5;
    c.class_id = 4;
    c.variant_b = true;
    c.representative = {0, 0, 0, 0, 1};
  } else {
    throw ZeroVectorError();
  }
  return n;
}

bool equivalent(const CoeffVector& v, const CoeffVector& w, double tol) {
  OptimalClass p = normalize(v).cls;
  OptimalClass q = normalize(w).cls;
  auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); };
  auto planar = [](int id) { return id == 1 || id == 2; };
  if (planar(p.class_id) && planar(q.class_id)) {
    return (close(p.c1, q.c1) && close(p.c2, q.c2)) || (close(p.c1, -q.c1) && close(p.c2, -q.c2));
  }
  if (p.class_id != q.class_id || p.variant_b != q.variant_b) return false;
  return close(p.c1, q.c1) && close(p.c2, q.c2);
}

}  // namespace liesym
