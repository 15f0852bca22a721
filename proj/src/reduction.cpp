#include "liesym/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "liesym/linalg.hpp"

namespace liesym {

namespace {

const Symbol& coord(std::size_t i) { return base_coordinates()[i]; }

bool vanishes(const Expr& e) { return e.is_zero() || equals(e, Expr()); }

bool on_base(const Expr& e) {
  for (std::size_t i = 0; i < 3; ++i)
    if (depends_on(e, coord(i))) return true;
  return false;
}

bool is_reduced_var(const Symbol& s) { return s.is_differential() && (s.base() == "h" || s.base() == "g"); }

bool is_reduced_atom(const AtomNode& n) { return n.kind == AtomKind::Symbol && is_reduced_var(*n.symbol); }

std::string reduced_base(const std::string& base) {
  if (base == "u") return "h";
  if (base == "f") return "g";
  throw ReductionError("unexpected dependent variable '" + base + "'");
}

/// D_v of an expression in (x, y, t) and jets of h, g over (xi, eta).
Expr chain_derivative(const Expr& e, IndexVar v, const SimilarityChart& chart) {
  const Symbol var = Symbol::independent(std::string(index_name(v)));
  const Expr dxi = partial(chart.xi, var);
  const Expr deta = partial(chart.eta, var);
  return differentiate(e, [&](const Symbol& s) -> Expr {
    if (s == var) return Expr(1);
    if (is_reduced_var(s)) return Expr(s.derive(IndexVar::Xi)) * dxi + Expr(s.derive(IndexVar::Eta)) * deta;
    return Expr();
  });
}

class Lift {
public:
  explicit Lift(const SimilarityChart& chart) : chart_(chart) {}

  const Expr& operator()(const Symbol& s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    Expr value;
    if (s.order() == 0) {
      value = Expr(Symbol::dependent(reduced_base(s.base())));
    } else {
      std::vector<IndexVar> idx = s.indices();
      IndexVar last = idx.back();
      idx.pop_back();
      value = chain_derivative((*this)(Symbol::jet(s.base(), idx)), last, chart_);
    }
    return cache_.emplace(s, std::move(value)).first->second;
  }

private:
  const SimilarityChart& chart_;
  std::map<Symbol, Expr> cache_;
};

std::optional<Rational> rational_of(const Expr& e) { return e.is_zero() ? Rational(0) : e.constant_value(); }

SimilarityChart constant_chart(const Generator& v, const std::array<Rational, 3>& c) {
  std::size_t p = 2;
  while (c[p].is_zero()) --p;
  std::vector<std::array<Rational, 3>> rows;
  std::vector<Expr> invariants;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == p) continue;
    std::array<Rational, 3> row{};
    row[i] = Rational(1);
    row[p] = -(c[i] / c[p]);
    rows.push_back(row);
    invariants.push_back(Expr(coord(i)) + Expr(row[p]) * Expr(coord(p)));
  }
  // Section: solve [l1; l2; c] (x, y, t) = (xi, eta, 0).
  RationalMatrix m(3, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    m(0, j) = rows[0][j];
    m(1, j) = rows[1][j];
    m(2, j) = c[j];
  }
  auto col_xi = solve_linear(m, {Rational(1), Rational(0), Rational(0)});
  auto col_eta = solve_linear(m, {Rational(0), Rational(1), Rational(0)});
  if (!col_xi || !col_eta) throw ReductionError("degenerate invariant system");
  Bindings section;
  for (std::size_t i = 0; i < 3; ++i)
    section[coord(i)] = Expr((*col_xi)[i]) * Expr(xi_symbol()) + Expr((*col_eta)[i]) * Expr(eta_symbol());
  return make_chart(v, invariants[0], invariants[1], section);
}

}  // namespace

UnsupportedGeneratorError::UnsupportedGeneratorError(const std::string& what)
    : std::invalid_argument("unsupported generator: " + what + " (supported: " + catalog() + ")") {}

const char* UnsupportedGeneratorError::catalog() {
  return "c1*X1 + c2*X2 + c3*X3 with rational c not all zero, k*X4, or k*X4 + c*X3";
}

Symbol xi_symbol() { return Symbol::independent("xi"); }
Symbol eta_symbol() { return Symbol::independent("eta"); }
Symbol h_symbol() { return Symbol::dependent("h"); }
Symbol g_symbol() { return Symbol::dependent("g"); }

SimilarityChart make_chart(const Generator& v, const Expr& xi, const Expr& eta, const Bindings& section) {
  if (!vanishes(v.apply(xi))) throw std::invalid_argument("xi is not invariant: V(xi) = " + v.apply(xi).str());
  if (!vanishes(v.apply(eta))) throw std::invalid_argument("eta is not invariant: V(eta) = " + v.apply(eta).str());
  for (const auto& e : {xi, eta}) {
    for (const Symbol& s : free_symbols(e)) {
      if (s.kind() != SymbolKind::Independent || s.as_index() > IndexVar::T)
        throw std::invalid_argument("invariants must depend on x, y, t only: " + e.str());
    }
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::array<std::array<Expr, 3>, 2> jac;
  for (std::size_t i = 0; i < 3; ++i) {
    jac[0][i] = partial(xi, coord(i));
    jac[1][i] = partial(eta, coord(i));
  }
  for (int k = 0; k < 5; ++k) {
    Assignment a;
    double x = 0, y = 0;
    do {
      x = d(rng);
      y = d(rng);
    } while (x * x + y * y < 0.25);
    a.values = {{"x", x}, {"y", y}, {"t", d(rng)}};
    double j[2][3];
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t i = 0; i < 3; ++i) j[r][i] = eval_numeric(jac[r][i], a);
    double best = 0.0;
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) best = std::max(best, std::abs(j[0][p] * j[1][q] - j[0][q] * j[1][p]));
    if (best < 1e-9) throw std::invalid_argument("invariants are not functionally independent");
  }
  if (!equals(substitute_simultaneous(xi, section), Expr(xi_symbol())) ||
      !equals(substitute_simultaneous(eta, section), Expr(eta_symbol()))) {
    throw std::invalid_argument("section does not invert the invariants");
  }
  return SimilarityChart{v, xi, eta, section};
}

SimilarityChart characteristic_invariants(const Generator& v) {
  if (v.is_zero()) throw UnsupportedGeneratorError("zero generator");
  if (!v.phi1().is_zero() || !v.phi2().is_zero())
    throw UnsupportedGeneratorError("nonzero u or f component in " + v.str());
  std::array<std::optional<Rational>, 3> c{rational_of(v.xi1()), rational_of(v.xi2()), rational_of(v.xi3())};
  if (c[0] && c[1] && c[2]) return constant_chart(v, {*c[0], *c[1], *c[2]});

  // k X4 + c X3: xi1 = k y, xi2 = -k x, xi3 = c.
  const Expr x(coord(0)), y(coord(1)), t(coord(2));
  auto k = rational_of(partial(v.xi1(), coord(1)));
  if (!k || k->is_zero() || !(v.xi1() == Expr(*k) * y) || !(v.xi2() == -(Expr(*k) * x)) || !c[2])
    throw UnsupportedGeneratorError(v.str());
  const Expr xi = x * x + y * y;
  Bindings section{{coord(0), sqrt(Expr(xi_symbol()))}, {coord(1), Expr()}, {coord(2), Expr(eta_symbol())}};
  if (c[2]->is_zero()) return make_chart(v, xi, t, section);
  const Rational ratio = *c[2] / *k;  // V = k (X4 + ratio X3)
  section[coord(2)] = Expr(ratio) * Expr(eta_symbol());
  return make_chart(v, xi, atan2(y, x) + Expr(Rational(1) / ratio) * t, section);
}

ReducedPDE reduce_pde(const PDEInstance& pde, const SimilarityChart& chart) {
  Lift lift(chart);
  Bindings b;
  for (const Symbol& s : free_symbols(pde.residual)) {
    if (s.is_differential()) b[s] = lift(s);
  }
  Expr lifted = substitute(pde.residual, b);
  Expr out;
  for (const auto& [mono, coeff] : collect(lifted, is_reduced_atom)) {
    if (mono.size() > 1 || (mono.size() == 1 && !mono[0].second.is_one()))
      throw ReductionError("reduced residual is not linear in h and g");
    Expr c = coeff;
    if (on_base(c)) {
      if (!vanishes(chart.generator.apply(c)))
        throw ReductionError("coefficient " + c.str() + " is not invariant under " + chart.generator.str());
      c = substitute_simultaneous(c, chart.section);
    }
    if (on_base(c) || depends_on(c, Symbol::dependent("u")) || depends_on(c, Symbol::dependent("f")))
      throw ReductionError("residual not expressible in (xi, eta) alone: " + c.str());
    out += c * monomial_expr(mono);
  }
  return ReducedPDE{out};
}

namespace {

Expr random_polynomial(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<int> coef(-3, 3);
  Expr p;
  const Expr xi(xi_symbol()), eta(eta_symbol());
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) {
      int k = coef(rng);
      if (k != 0) p += Expr(k) * pow(xi, Rational(i)) * pow(eta, Rational(j));
    }
  return p;
}

Expr derivative_along(Expr e, const std::vector<IndexVar>& idx) {
  for (IndexVar v : idx) e = partial(e, Symbol::independent(std::string(index_name(v))));
  return e;
}

}  // namespace

ReductionCheck verify_reduction(const PDEInstance& pde, const SimilarityChart& chart, const ReducedPDE& reduced,
                                std::uint64_t seed, int functions, int points) {
  ReductionCheck rep;
  rep.seed = seed;
  rep.functions = functions;
  rep.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord_d(-2.0, 2.0);
  std::uniform_real_distribution<double> param_d(0.5, 2.0);

  std::vector<Symbol> full_jets, reduced_jets, params;
  for (const Symbol& s : free_symbols(pde.residual)) {
    if (s.is_differential()) full_jets.push_back(s);
    if (s.kind() == SymbolKind::Parameter) params.push_back(s);
  }
  for (const Symbol& s : free_symbols(reduced.residual)) {
    if (s.is_differential()) reduced_jets.push_back(s);
    if (s.kind() == SymbolKind::Parameter && std::find(params.begin(), params.end(), s) == params.end())
      params.push_back(s);
  }

  double worst = 0.0;
  for (int fn = 0; fn < functions; ++fn) {
    std::map<std::string, Expr> poly{{"h", random_polynomial(rng, 4)}, {"g", random_polynomial(rng, 4)}};
    const Bindings to_base{{xi_symbol(), chart.xi}, {eta_symbol(), chart.eta}};
    std::vector<std::pair<std::string, Expr>> full_vals, red_vals;
    for (const Symbol& s : full_jets) {
      Expr composite = substitute_simultaneous(poly.at(reduced_base(s.base())), to_base);
      full_vals.emplace_back(s.name(), derivative_along(composite, s.indices()));
    }
    for (const Symbol& s : reduced_jets) red_vals.emplace_back(s.name(), derivative_along(poly.at(s.base()), s.indices()));

    for (int pt = 0; pt < points; ++pt) {
      double x = 0, y = 0;
      do {
        x = coord_d(rng);
        y = coord_d(rng);
      } while (x * x + y * y < 0.25);
      const double t = coord_d(rng);
      Assignment base;
      base.values = {{"x", x}, {"y", y}, {"t", t}};
      Assignment red;
      red.values = {{"xi", eval_numeric(chart.xi, base)}, {"eta", eval_numeric(chart.eta, base)}};
      Assignment full_eval = base, red_eval = red;
      for (const Symbol& p : params) {
        double val = param_d(rng);
        full_eval.values[p.name()] = val;
        red_eval.values[p.name()] = val;
      }
      for (const auto& [name, e] : full_vals) full_eval.values[name] = eval_numeric(e, base);
      for (const auto& [name, e] : red_vals) red_eval.values[name] = eval_numeric(e, red);
      double lhs = eval_numeric(pde.residual, full_eval);
      double rhs = eval_numeric(reduced.residual, red_eval);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  rep.max_discrepancy = worst;
  rep.passed = std::isfinite(worst) && worst < 1e-7;
  return rep;
}

const std::vector<std::string>& printed_reduction_table() {
  static const std::vector<std::string> rows{
      "h_etaeta - a*h_xixieta - a*h_etaetaeta - b*h_xixi - b*h_etaeta - g",
      "h_etaeta - a*h_xixieta - a*h_etaetaeta - b*h_xixi - b*h_etaeta - g",
      "h_etaeta - a*h_xixieta - a*h_etaetaeta - b*h_xixi - b*h_etaeta - g",
      "h_xixi + a*h_xixieta + a*h_etaetaxi + a*h_xixixi - b*h_xixi - b*h_etaeta - b*h_xixi - g",
      "h_etaeta + a*h_xixieta + a*h_etaetaeta + a*h_etaetaeta - b*h_xixi - b*h_xixi - b*h_etaeta - b*h_etaeta - g",
  };
  return rows;
}

std::vector<Generator> reduction_table_generators() {
  auto x = standard_basis();
  return {x[0], x[1], x[2], Generator((x[0] + x[2]).components(), "X1 + X3"),
          Generator((x[1] + x[2]).components(), "X2 + X3")};
}

std::optional<std::size_t> reduction_table_row(const Generator& v) {
  auto gens = reduction_table_generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i] == v) return i + 1;
  return std::nullopt;
}

std::vector<std::string> diff_terms(const Expr& printed, const Expr& derived) {
  std::vector<std::string> out;
  const Expr d = printed - derived;
  for (const Term& term : d.terms()) out.push_back(Expr::from_terms({term}).str());
  return out;
}

ReductionAudit audit_reduction_table(const PDEInstance& pde) {
  ReductionAudit audit;
  const auto& printed = printed_reduction_table();
  auto gens = reduction_table_generators();
  for (std::size_t i = 0; i < printed.size(); ++i) {
    Expr derived = reduce_pde(pde, characteristic_invariants(gens[i])).residual;
    Expr ref = parse(printed[i]);
    ReductionAuditRow row;
    row.row = i + 1;
    row.generator = gens[i].label();
    row.derived = derived.str();
    row.printed = printed[i];
    row.diff_terms = diff_terms(ref, derived);
    row.match = row.diff_terms.empty();
    audit.rows.push_back(std::move(row));
  }
  std::vector<bool> seen(printed.size(), false);
  for (std::size_t i = 0; i < printed.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> group{i + 1};
    for (std::size_t j = i + 1; j < printed.size(); ++j) {
      if (printed[j] == printed[i]) {
        group.push_back(j + 1);
        seen[j] = true;
      }
    }
    if (group.size() > 1) audit.duplicate_rows.push_back(group);
  }
  return audit;
}

}  // namespace liesym
