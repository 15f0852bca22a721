#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "liesym/rational.hpp"

namespace liesym {

/// Variables that may appear as jet subscripts: x, y, t and the reduced-chart
/// coordinates xi, eta.
enum class IndexVar : std::uint8_t { X, Y, T, Xi, Eta };

std::string_view index_name(IndexVar v);
std::optional<IndexVar> index_from_name(std::string_view name);

/// Maximum total order of a jet symbol.
inline constexpr std::size_t kMaxJetOrder = 4;

class JetOrderError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnassignedSymbolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SubstitutionCycleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SymbolKind : std::uint8_t { Parameter, Independent, Dependent, Jet };

/// A named variable. Jet symbols carry their base dependent variable and a
/// sorted multiset of differentiation indices, so u_tx and u_xt coincide.
class Symbol {
public:
  static Symbol independent(std::string name);
  static Symbol dependent(std::string name);
  static Symbol parameter(std::string name);
  /// Empty `indices` yields the dependent symbol itself.
  static Symbol jet(std::string base, std::vector<IndexVar> indices);

  [[nodiscard]] SymbolKind kind() const { return kind_; }
  [[nodiscard]] const std::string& base() const { return base_; }
  [[nodiscard]] const std::vector<IndexVar>& indices() const { return indices_; }
  [[nodiscard]] std::size_t order() const { return indices_.size(); }
  [[nodiscard]] std::string name() const;

  /// Dependent or jet symbol (something a total derivative acts on).
  [[nodiscard]] bool is_differential() const {
    return kind_ == SymbolKind::Dependent || kind_ == SymbolKind::Jet;
  }
  /// The jet obtained by one more differentiation; throws JetOrderError past the cap.
  [[nodiscard]] Symbol derive(IndexVar v) const;
  /// For independent symbols named x, y, t, xi or eta.
  [[nodiscard]] std::optional<IndexVar> as_index() const;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b);

private:
  Symbol(std::string base, SymbolKind kind, std::vector<IndexVar> idx)
      : base_(std::move(base)), kind_(kind), indices_(std::move(idx)) {}

  std::string base_;
  SymbolKind kind_;
  std::vector<IndexVar> indices_;
};

enum class Func : std::uint8_t { Sin, Cos, Exp, Arctan, Atan2 };

enum class AtomKind : std::uint8_t { Symbol, Function, Arbitrary, Group };

struct AtomNode;
using Atom = std::shared_ptr<const AtomNode>;
using Factor = std::pair<Atom, Rational>;
/// Product of atoms raised to non-zero rational powers, sorted by atom order.
using Monomial = std::vector<Factor>;

class Expr;

struct Term {
  Rational coeff;
  Monomial mono;
};

/// Immutable symbolic expression held in canonical form: an expanded sum of
/// rational multiples of monomials. Construction always canonicalizes, so
/// structural equality is semantic equality modulo the rewrite set (trig
/// angle addition, cos^2 = 1 - sin^2, content-normalized opaque powers).
class Expr {
public:
  Expr();
  Expr(Rational c);  // NOLINT(google-explicit-constructor)
  Expr(std::int64_t c) : Expr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Expr(int c) : Expr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Expr(const Symbol& s);  // NOLINT(google-explicit-constructor)

  static Expr function(Func f, std::vector<Expr> args);
  /// Derivative `derivs` (multiset of parameter positions) of an opaque
  /// function `name(params...)` evaluated at `args`.
  static Expr arbitrary(std::string name, std::vector<std::string> params, std::vector<int> derivs,
                        std::vector<Expr> args);
  static Expr from_terms(std::vector<Term> terms);

  [[nodiscard]] const std::vector<Term>& terms() const { return *terms_; }
  [[nodiscard]] bool is_zero() const { return terms_->empty(); }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] std::optional<Rational> constant_value() const;
  [[nodiscard]] std::optional<Symbol> as_symbol() const;
  [[nodiscard]] std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b);

private:
  explicit Expr(std::shared_ptr<const std::vector<Term>> t) : terms_(std::move(t)) {}
  std::shared_ptr<const std::vector<Term>> terms_;
  friend struct ExprAccess;
};

struct FunctionAtom {
  Func func;
  std::vector<Expr> args;
};

struct ArbitraryAtom {
  std::string name;
  std::vector<std::string> params;
  std::vector<int> derivs;  // sorted
  std::vector<Expr> args;
};

struct AtomNode {
  AtomKind kind;
  std::optional<Symbol> symbol;
  std::optional<FunctionAtom> function;
  std::optional<ArbitraryAtom> arbitrary;
  std::optional<Expr> group;  // opaque base raised to a non-expandable power
};

/// Total order on expressions and atoms (used for canonical sorting).
int compare(const Expr& a, const Expr& b);
int compare(const Atom& a, const Atom& b);
int compare(const Monomial& a, const Monomial& b);

std::ostream& operator<<(std::ostream& os, const Expr& e);
std::string atom_str(const Atom& a);

Expr pow(const Expr& base, const Rational& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr arctan(const Expr& a);
Expr atan2(const Expr& y, const Expr& x);
Expr sqrt(const Expr& a);

/// Returns e unchanged; construction already canonicalizes. Rebuilds the tree
/// from scratch so idempotence is observable.
Expr canonicalize(const Expr& e);

using SymbolDerivative = std::function<Expr(const Symbol&)>;

/// Generic derivation: applies product/chain rules and asks `dsym` for the
/// derivative of each symbol.
Expr differentiate(const Expr& e, const SymbolDerivative& dsym);

/// Partial derivative treating every other symbol as constant.
Expr partial(const Expr& e, const Symbol& s);

/// Total derivative D_v: dependent and jet symbols gain the index v.
Expr total_derivative(const Expr& e, IndexVar v);

using Bindings = std::map<Symbol, Expr>;

/// Simultaneous substitution. Throws SubstitutionCycleError if the binding
/// graph has a cycle (a key whose value reaches that key again).
Expr substitute(const Expr& e, const Bindings& bindings);
/// Simultaneous substitution without the cycle check (coordinate changes such
/// as x -> x cos s + y sin s, y -> ...).
Expr substitute_simultaneous(const Expr& e, const Bindings& bindings);

/// Replaces every occurrence of the opaque function `name` (and its formal
/// derivatives) by `body`, a concrete expression in `params`.
Expr instantiate_function(const Expr& e, const std::string& name, const std::vector<Symbol>& params,
                          const Expr& body);

std::set<Symbol> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const Symbol& s);
/// True if some atom anywhere in e satisfies pred.
bool contains_atom(const Expr& e, const std::function<bool(const AtomNode&)>& pred);

/// Concrete stand-in for an opaque function when evaluating numerically.
struct StandIn {
  std::vector<Symbol> params;
  Expr body;
};

/// Numeric values keyed by printed name: symbols ("u_xt", "a") and opaque
/// function atoms ("F2_x(x, y, t)"). Opaque functions without a direct value
/// fall back to a registered stand-in.
struct Assignment {
  std::map<std::string, double> values;
  std::map<std::string, StandIn> functions;
};

/// IEEE double evaluation. Throws UnassignedSymbolError or std::domain_error.
double eval_numeric(const Expr& e, const Assignment& assignment);

struct EqualsOptions {
  int samples = 20;
  double tolerance = 1e-9;
  double lo = -2.0;
  double hi = 2.0;
  std::uint64_t seed = 0x5eedULL;
};

/// Canonical difference is zero, or the difference evaluates below tolerance
/// at `samples` random points. Opaque atoms are sampled as independent values.
bool equals(const Expr& a, const Expr& b, const EqualsOptions& opts = {});

/// Splits e as a polynomial in the atoms selected by `is_coordinate`.
/// Returns (coordinate monomial, coefficient) pairs in canonical monomial
/// order. Throws if a coordinate atom occurs non-polynomially.
std::vector<std::pair<Monomial, Expr>> collect(const Expr& e,
                                               const std::function<bool(const AtomNode&)>& is_coordinate);

/// Monomial as an expression.
Expr monomial_expr(const Monomial& m);

}  // namespace liesym
