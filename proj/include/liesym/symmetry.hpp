#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/parser.hpp"

namespace liesym {

/// The base coordinates (x, y, t, u, f) a point vector field acts on.
const std::array<Symbol, 5>& base_coordinates();

/// Point vector field xi1 d_x + xi2 d_y + xi3 d_t + phi1 d_u + phi2 d_f.
class Generator {
public:
  Generator();
  Generator(Expr xi1, Expr xi2, Expr xi3, Expr phi1, Expr phi2, std::string label = {});
  explicit Generator(std::array<Expr, 5> components, std::string label = {});

  [[nodiscard]] const std::array<Expr, 5>& components() const { return c_; }
  [[nodiscard]] const Expr& xi1() const { return c_[0]; }
  [[nodiscard]] const Expr& xi2() const { return c_[1]; }
  [[nodiscard]] const Expr& xi3() const { return c_[2]; }
  [[nodiscard]] const Expr& phi1() const { return c_[3]; }
  [[nodiscard]] const Expr& phi2() const { return c_[4]; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] bool is_zero() const;

  /// V(e) with V acting as a first-order differential operator.
  [[nodiscard]] Expr apply(const Expr& e) const;

  /// "y*d_x - x*d_y" style rendering.
  [[nodiscard]] std::string str() const;

  Generator operator+(const Generator& o) const;
  Generator operator-(const Generator& o) const;
  Generator scaled(const Expr& k) const;

  friend bool operator==(const Generator& a, const Generator& b) { return a.c_ == b.c_; }

private:
  std::array<Expr, 5> c_;
  std::string label_;
};

/// [V, W]^k = V(W^k) - W(V^k).
Generator bracket(const Generator& v, const Generator& w);

/// X1 = d_x, X2 = d_y, X3 = d_t, X4 = y d_x - x d_y, X5 = u d_u + f d_f.
std::array<Generator, 5> standard_basis();

/// F2(x,y,t) d_u + (F2_tt - a(F2_xxt + F2_yyt) - b(F2_xx + F2_yy)) d_f.
Generator f2_family_generator();

/// Generator from text: a basis combination such as "X1 + 2*X3" (XF2 names
/// the F2 family) or five ';'-separated component expressions.
Generator parse_generator(std::string_view spec, const SymbolTable& table = SymbolTable::standard());

/// Delta = u_tt - a(u_xxt + u_yyt) - b(u_xx + u_yy) - f together with the
/// equation solved for f.
struct PDEInstance {
  Expr residual;
  Expr solved_form;

  /// Requires the residual to be linear in f with coefficient -1.
  static PDEInstance from_residual(const Expr& residual);
  static PDEInstance viscoelastic();
  /// Same equation with numeric values substituted for a and/or b.
  [[nodiscard]] PDEInstance with_parameters(std::optional<Rational> a, std::optional<Rational> b) const;
};

class NotClosedError : public std::runtime_error {
public:
  NotClosedError(std::size_t i, std::size_t j, const std::string& detail)
      : std::runtime_error("bracket [X" + std::to_string(i + 1) + ", X" + std::to_string(j + 1) +
                           "] is not closed in the span of the basis: " + detail),
        pair_{i, j} {}
  [[nodiscard]] std::pair<std::size_t, std::size_t> pair() const { return pair_; }

private:
  std::pair<std::size_t, std::size_t> pair_;
};

/// c(i, j, k) with [X_i, X_j] = sum_k c(i, j, k) X_k (0-based indices).
class StructureConstants {
public:
  explicit StructureConstants(std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const Rational& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return c_[(i * dim_ + j) * dim_ + k];
  }
  Rational& operator()(std::size_t i, std::size_t j, std::size_t k) { return c_[(i * dim_ + j) * dim_ + k]; }

  [[nodiscard]] std::vector<Rational> bracket_coords(std::size_t i, std::size_t j) const;
  [[nodiscard]] bool is_antisymmetric() const;
  [[nodiscard]] bool satisfies_jacobi() const;
  [[nodiscard]] bool is_zero() const;

  /// Cell text for [X_i, X_j], e.g. "-X2" or "0".
  [[nodiscard]] std::string cell(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::string markdown() const;

  friend bool operator==(const StructureConstants&, const StructureConstants&) = default;

private:
  std::size_t dim_;
  std::vector<Rational> c_;
};

/// Published commutator table of X1..X5, cell [i][j] = [X_i, X_j].
const std::array<std::array<std::string, 5>, 5>& printed_commutator_table();

/// Structure constants of the span of `basis`; throws NotClosedError.
StructureConstants commutator_table(std::span<const Generator> basis);

/// Coordinates of `g` in the span of `basis` if it lies there with rational
/// coefficients.
std::optional<std::vector<Rational>> basis_coordinates(const Generator& g, std::span<const Generator> basis);

/// Lazily computed prolongation coefficients,
/// phi^{J,i} = D_i phi^J - sum_k (D_i xi^k) u_{J,k}.
class Prolongation {
public:
  Prolongation(Generator v, std::size_t max_order);

  /// Coefficient for a base coordinate, u/f or one of their jets.
  const Expr& coefficient(const Symbol& s);
  [[nodiscard]] std::size_t max_order() const { return max_order_; }

private:
  Generator v_;
  std::size_t max_order_;
  std::map<Symbol, Expr> cache_;
};

/// Coefficients for every u_J and f_J with |J| <= order (J over x, y, t).
std::map<Symbol, Expr> prolong(const Generator& v, std::size_t order);

/// Applies the prolonged field to an expression in base coordinates and jets.
Expr apply_prolonged(Prolongation& pr, const Expr& e);

/// Pr^(3)V(Delta) with f replaced by the solved form.
Expr invariance_residual(const Generator& v, const PDEInstance& pde);

struct SymmetryReport {
  bool is_symmetry = false;
  bool canonical_zero = false;
  Expr residual;
  double max_numeric_residual = 0.0;
  int numeric_points = 0;
};

SymmetryReport verify_symmetry(const Generator& v, const PDEInstance& pde, std::uint64_t seed = 42);

/// Opaque coefficient functions xi1, xi2, xi3, phi1, phi2 of (x, y, t, u, f).
SymbolTable ansatz_table();
Generator general_ansatz();

/// Coefficients of the general solution: xi1 = c1 y + c2, xi2 = -c1 x + c3,
/// xi3 = c4, phi1 = c5 u + F2, phi2 = c5 f + (F2 terms).
std::array<Expr, 5> general_solution();

/// Replaces the ansatz functions xi1..phi2 (params x, y, t, u, f) by `solution`.
Expr instantiate_ansatz(const Expr& e, const std::array<Expr, 5>& solution);

struct DeterminingEquation {
  Monomial jet_monomial;  // the jet monomial this equation is the coefficient of
  Expr equation;
};

struct DeterminingSystem {
  std::vector<DeterminingEquation> equations;  // deduplicated, leading coefficient 1
  std::size_t raw_count = 0;                   // nonzero coefficients before deduplication
};

/// Splits the on-shell invariance condition by monomials in the u- and f-jets.
DeterminingSystem determining_equations(const Generator& ansatz, const PDEInstance& pde);

}  // namespace liesym
