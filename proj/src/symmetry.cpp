#include "liesym/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "liesym/linalg.hpp"

namespace liesym {

const std::array<Symbol, 5>& base_coordinates() {
  static const std::array<Symbol, 5> coords{Symbol::independent("x"), Symbol::independent("y"),
                                            Symbol::independent("t"), Symbol::dependent("u"),
                                            Symbol::dependent("f")};
  return coords;
}

namespace {

const std::array<const char*, 5> kComponentNames{"x", "y", "t", "u", "f"};

void require_point_field(const std::array<Expr, 5>& c) {
  for (const auto& e : c) {
    for (const auto& s : free_symbols(e)) {
      if (s.kind() == SymbolKind::Jet)
        throw std::invalid_argument("generator coefficient depends on jet variable " + s.name());
    }
  }
}

}  // namespace

Generator::Generator() = default;

Generator::Generator(Expr xi1, Expr xi2, Expr xi3, Expr phi1, Expr phi2, std::string label)
    : Generator(std::array<Expr, 5>{std::move(xi1), std::move(xi2), std::move(xi3), std::move(phi1), std::move(phi2)},
                std::move(label)) {}

Generator::Generator(std::array<Expr, 5> components, std::string label)
    : c_(std::move(components)), label_(std::move(label)) {
  require_point_field(c_);
}

bool Generator::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Expr& e) { return e.is_zero(); });
}

Expr Generator::apply(const Expr& e) const {
  Expr out;
  const auto& coords = base_coordinates();
  for (std::size_t k = 0; k < 5; ++k) {
    if (c_[k].is_zero()) continue;
    out += c_[k] * partial(e, coords[k]);
  }
  return out;
}

std::string Generator::str() const {
  std::string out;
  for (std::size_t k = 0; k < 5; ++k) {
    const Expr& c = c_[k];
    if (c.is_zero()) continue;
    std::string op = std::string("d_") + kComponentNames[k];
    std::string piece;
    if (c == Expr(1)) {
      piece = op;
    } else if (c == Expr(-1)) {
      piece = "-" + op;
    } else if (c.terms().size() == 1) {
      piece = c.str() + "*" + op;
    } else {
      piece = "(" + c.str() + ")*" + op;
    }
    if (!out.empty()) {
      if (piece.front() == '-') {
        out += " - " + piece.substr(1);
      } else {
        out += " + " + piece;
      }
    } else {
      out = piece;
    }
  }
  return out.empty() ? "0" : out;
}

Generator Generator::operator+(const Generator& o) const {
  std::array<Expr, 5> c;
  for (std::size_t k = 0; k < 5; ++k) c[k] = c_[k] + o.c_[k];
  return Generator(c);
}

Generator Generator::operator-(const Generator& o) const { return *this + o.scaled(Expr(-1)); }

Generator Generator::scaled(const Expr& k) const {
  std::array<Expr, 5> c;
  for (std::size_t i = 0; i < 5; ++i) c[i] = c_[i] * k;
  return Generator(c);
}

Generator bracket(const Generator& v, const Generator& w) {
  std::array<Expr, 5> c;
  for (std::size_t k = 0; k < 5; ++k) c[k] = v.apply(w.components()[k]) - w.apply(v.components()[k]);
  return Generator(c);
}

std::array<Generator, 5> standard_basis() {
  Expr x(Symbol::independent("x"));
  Expr y(Symbol::independent("y"));
  Expr u(Symbol::dependent("u"));
  Expr f(Symbol::dependent("f"));
  return {Generator(1, 0, 0, 0, 0, "X1"), Generator(0, 1, 0, 0, 0, "X2"), Generator(0, 0, 1, 0, 0, "X3"),
          Generator(y, -x, 0, 0, 0, "X4"), Generator(0, 0, 0, u, f, "X5")};
}

namespace {

Expr f2(std::vector<int> derivs) {
  const auto& c = base_coordinates();
  return Expr::arbitrary("F2", {"x", "y", "t"}, std::move(derivs), {Expr(c[0]), Expr(c[1]), Expr(c[2])});
}

// F2 image under the equation operator: F2_tt - a(F2_xxt + F2_yyt) - b(F2_xx + F2_yy).
Expr f2_image() {
  Expr a(Symbol::parameter("a"));
  Expr b(Symbol::parameter("b"));
  return f2({2, 2}) - a * (f2({0, 0, 2}) + f2({1, 1, 2})) - b * (f2({0, 0}) + f2({1, 1}));
}

}  // namespace

Generator f2_family_generator() { return Generator(0, 0, 0, f2({}), f2_image(), "XF2"); }

Generator parse_generator(std::string_view spec, const SymbolTable& table) {
  std::string text(spec);
  if (text.find(';') != std::string::npos) {
    std::array<Expr, 5> c;
    std::size_t start = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      std::size_t end = text.find(';', start);
      if ((end == std::string::npos) != (k == 4))
        throw std::invalid_argument("expected five ';'-separated components (xi1;xi2;xi3;phi1;phi2)");
      c[k] = parse(std::string_view(text).substr(start, end == std::string::npos ? std::string::npos : end - start),
                   table);
      start = end + 1;
    }
    return Generator(c, text);
  }
  SymbolTable t = table;
  const auto basis = standard_basis();
  const std::array<std::string, 6> names{"X1", "X2", "X3", "X4", "X5", "XF2"};
  for (const auto& n : names) t.declare(Symbol::parameter(n));
  Expr e = parse(text, t);
  auto is_label = [&](const AtomNode& n) {
    return n.kind == AtomKind::Symbol && std::find(names.begin(), names.end(), n.symbol->name()) != names.end();
  };
  Generator g(0, 0, 0, 0, 0);
  for (const auto& [mono, coeff] : collect(e, is_label)) {
    if (mono.size() != 1 || !mono[0].second.is_one())
      throw std::invalid_argument("generator spec must be linear in X1..X5, XF2: '" + text + "'");
    std::string name = mono[0].first->symbol->name();
    Generator term = name == "XF2" ? f2_family_generator()
                                   : basis[static_cast<std::size_t>(name[1] - '1')];
    g = g + term.scaled(coeff);
  }
  return Generator(g.components(), text);
}

// ---------------------------------------------------------------- PDE instance

PDEInstance PDEInstance::from_residual(const Expr& residual) {
  Symbol f = Symbol::dependent("f");
  Expr df = partial(residual, f);
  if (!(df == Expr(-1))) throw std::invalid_argument("residual must be linear in f with coefficient -1");
  PDEInstance p;
  p.residual = residual;
  p.solved_form = residual + Expr(f);
  return p;
}

PDEInstance PDEInstance::viscoelastic() {
  return from_residual(parse("u_tt - a*(u_xxt + u_yyt) - b*(u_xx + u_yy) - f"));
}

PDEInstance PDEInstance::with_parameters(std::optional<Rational> a, std::optional<Rational> b) const {
  Bindings bind;
  if (a) bind.emplace(Symbol::parameter("a"), Expr(*a));
  if (b) bind.emplace(Symbol::parameter("b"), Expr(*b));
  return from_residual(substitute(residual, bind));
}

// ---------------------------------------------------------------- structure constants

StructureConstants::StructureConstants(std::size_t dim) : dim_(dim), c_(dim * dim * dim) {}

std::vector<Rational> StructureConstants::bracket_coords(std::size_t i, std::size_t j) const {
  std::vector<Rational> out(dim_);
  for (std::size_t k = 0; k < dim_; ++k) out[k] = (*this)(i, j, k);
  return out;
}

bool StructureConstants::is_antisymmetric() const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k)
        if ((*this)(i, j, k) != -(*this)(j, i, k)) return false;
  return true;
}

bool StructureConstants::satisfies_jacobi() const {
  const auto& c = *this;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k)
        for (std::size_t l = 0; l < dim_; ++l) {
          Rational s;
          for (std::size_t m = 0; m < dim_; ++m) {
            s += c(j, k, m) * c(i, m, l) + c(k, i, m) * c(j, m, l) + c(i, j, m) * c(k, m, l);
          }
          if (!s.is_zero()) return false;
        }
  return true;
}

bool StructureConstants::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& r) { return r.is_zero(); });
}

std::string StructureConstants::cell(std::size_t i, std::size_t j) const {
  Expr e;
  for (std::size_t k = 0; k < dim_; ++k) {
    e += Expr((*this)(i, j, k)) * Expr(Symbol::parameter("X" + std::to_string(k + 1)));
  }
  return e.str();
}

std::string StructureConstants::markdown() const {
  std::ostringstream os;
  os << "| [ , ] |";
  for (std::size_t j = 0; j < dim_; ++j) os << " X" << j + 1 << " |";
  os << "\n|---|";
  for (std::size_t j = 0; j < dim_; ++j) os << "---|";
  os << "\n";
  for (std::size_t i = 0; i < dim_; ++i) {
    os << "| X" << i + 1 << " |";
    for (std::size_t j = 0; j < dim_; ++j) os << " " << cell(i, j) << " |";
    os << "\n";
  }
  return os.str();
}

const std::array<std::array<std::string, 5>, 5>& printed_commutator_table() {
  static const std::array<std::array<std::string, 5>, 5> table{{
      {"0", "0", "0", "-X2", "0"},
      {"0", "0", "0", "X1", "0"},
      {"0", "0", "0", "0", "0"},
      {"X2", "-X1", "0", "0", "0"},
      {"0", "0", "0", "0", "0"},
  }};
  return table;
}

std::optional<std::vector<Rational>> basis_coordinates(const Generator& g, std::span<const Generator> basis) {
  // One linear equation per (component, monomial): sum_i k_i B_i = g.
  struct MonoKeyLess {
    bool operator()(const std::pair<std::size_t, Monomial>& a, const std::pair<std::size_t, Monomial>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return compare(a.second, b.second) < 0;
    }
  };
  std::map<std::pair<std::size_t, Monomial>, std::vector<Rational>, MonoKeyLess> rows;
  const std::size_t n = basis.size();
  auto row = [&](std::size_t comp, const Monomial& m) -> std::vector<Rational>& {
    auto key = std::make_pair(comp, m);
    auto it = rows.find(key);
    if (it == rows.end()) it = rows.emplace(key, std::vector<Rational>(n + 1)).first;
    return it->second;
  };
  for (std::size_t comp = 0; comp < 5; ++comp) {
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& t : basis[i].components()[comp].terms()) row(comp, t.mono)[i] += t.coeff;
    for (const auto& t : g.components()[comp].terms()) row(comp, t.mono)[n] += t.coeff;
  }
  RationalMatrix a(rows.size(), n);
  std::vector<Rational> rhs(rows.size());
  std::size_t r = 0;
  for (const auto& [key, vals] : rows) {
    for (std::size_t i = 0; i < n; ++i) a(r, i) = vals[i];
    rhs[r] = vals[n];
    ++r;
  }
  return solve_linear(a, rhs);
}

StructureConstants commutator_table(std::span<const Generator> basis) {
  const std::size_t n = basis.size();
  StructureConstants sc(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) {
        for (std::size_t k = 0; k < n; ++k) sc(i, j, k) = -sc(j, i, k);
        continue;
      }
      Generator b = bracket(basis[i], basis[j]);
      auto coords = basis_coordinates(b, basis);
      if (!coords) throw NotClosedError(i, j, b.str());
      for (std::size_t k = 0; k < n; ++k) sc(i, j, k) = (*coords)[k];
    }
  }
  return sc;
}

// ---------------------------------------------------------------- prolongation

Prolongation::Prolongation(Generator v, std::size_t max_order) : v_(std::move(v)), max_order_(max_order) {
  if (max_order > kMaxJetOrder - 1) {
    throw JetOrderError("prolongation order " + std::to_string(max_order) + " exceeds " +
                        std::to_string(kMaxJetOrder - 1));
  }
}

const Expr& Prolongation::coefficient(const Symbol& s) {
  if (auto it = cache_.find(s); it != cache_.end()) return it->second;
  Expr result;
  const auto& coords = base_coordinates();
  const auto& c = v_.components();
  if (s.kind() == SymbolKind::Jet && (s.base() == "u" || s.base() == "f")) {
    if (s.order() > max_order_) {
      throw JetOrderError("jet " + s.name() + " exceeds prolongation order " + std::to_string(max_order_));
    }
    std::vector<IndexVar> parent_idx = s.indices();
    IndexVar last = parent_idx.back();
    parent_idx.pop_back();
    Symbol parent = Symbol::jet(s.base(), parent_idx);
    result = total_derivative(coefficient(parent), last);
    const std::array<IndexVar, 3> vars{IndexVar::X, IndexVar::Y, IndexVar::T};
    for (std::size_t k = 0; k < 3; ++k) {
      Expr dxi = total_derivative(c[k], last);
      if (dxi.is_zero()) continue;
      result -= dxi * Expr(parent.derive(vars[k]));
    }
  } else {
    for (std::size_t k = 0; k < 5; ++k) {
      if (coords[k] == s) result = c[k];
    }
  }
  return cache_.emplace(s, std::move(result)).first->second;
}

std::map<Symbol, Expr> prolong(const Generator& v, std::size_t order) {
  Prolongation pr(v, order);
  std::map<Symbol, Expr> out;
  const std::array<IndexVar, 3> vars{IndexVar::X, IndexVar::Y, IndexVar::T};
  // Sorted multisets over {x, y, t} of size <= order.
  std::vector<std::vector<IndexVar>> multisets{{}};
  std::vector<std::vector<IndexVar>> frontier{{}};
  for (std::size_t n = 1; n <= order; ++n) {
    std::vector<std::vector<IndexVar>> next;
    for (const auto& m : frontier) {
      for (auto v2 : vars) {
        if (!m.empty() && v2 < m.back()) continue;
        auto e = m;
        e.push_back(v2);
        next.push_back(e);
      }
    }
    multisets.insert(multisets.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  for (const char* base : {"u", "f"}) {
    for (const auto& m : multisets) {
      Symbol s = Symbol::jet(base, m);
      out.emplace(s, pr.coefficient(s));
    }
  }
  return out;
}

Expr apply_prolonged(Prolongation& pr, const Expr& e) {
  Expr out;
  for (const auto& s : free_symbols(e)) {
    if (s.kind() == SymbolKind::Parameter) continue;
    const Expr& coeff = pr.coefficient(s);
    if (coeff.is_zero()) continue;
    out += partial(e, s) * coeff;
  }
  return out;
}

Expr invariance_residual(const Generator& v, const PDEInstance& pde) {
  Prolongation pr(v, 3);
  Expr r = apply_prolonged(pr, pde.residual);
  return substitute(r, {{Symbol::dependent("f"), pde.solved_form}});
}

SymmetryReport verify_symmetry(const Generator& v, const PDEInstance& pde, std::uint64_t seed) {
  SymmetryReport rep;
  rep.residual = invariance_residual(v, pde);
  rep.canonical_zero = rep.residual.is_zero();
  // Numeric fallback: every remaining symbol and opaque atom is a free
  // on-shell coordinate once f has been eliminated.
  std::set<std::string> keys;
  for (const auto& s : free_symbols(rep.residual)) keys.insert(s.name());
  contains_atom(rep.residual, [&](const AtomNode& n) {
    if (n.kind == AtomKind::Arbitrary) keys.insert(atom_str(std::make_shared<AtomNode>(n)));
    return false;
  });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int attempt = 0; attempt < 200 && rep.numeric_points < 20; ++attempt) {
    Assignment asg;
    for (const auto& k : keys) asg.values[k] = dist(rng);
    try {
      double r = std::fabs(eval_numeric(rep.residual, asg));
      rep.max_numeric_residual = std::max(rep.max_numeric_residual, r);
      ++rep.numeric_points;
    } catch (const std::domain_error&) {
    }
  }
  rep.is_symmetry = rep.canonical_zero || (rep.numeric_points >= 20 && rep.max_numeric_residual < 1e-9);
  return rep;
}

// ---------------------------------------------------------------- determining equations

namespace {

const std::array<const char*, 5> kAnsatzNames{"xi1", "xi2", "xi3", "phi1", "phi2"};
const std::vector<std::string> kAnsatzParams{"x", "y", "t", "u", "f"};

Expr ansatz_function(const char* name) {
  std::vector<Expr> args;
  for (const auto& s : base_coordinates()) args.emplace_back(s);
  return Expr::arbitrary(name, kAnsatzParams, {}, std::move(args));
}

std::size_t degree(const Monomial& m) {
  std::size_t d = 0;
  for (const auto& f : m) d += static_cast<std::size_t>(f.second.num());
  return d;
}

}  // namespace

SymbolTable ansatz_table() {
  SymbolTable t = SymbolTable::standard();
  for (const char* n : kAnsatzNames) t.declare_function({n, kAnsatzParams});
  return t;
}

Generator general_ansatz() {
  return Generator(ansatz_function("xi1"), ansatz_function("xi2"), ansatz_function("xi3"), ansatz_function("phi1"),
                   ansatz_function("phi2"), "ansatz");
}

std::array<Expr, 5> general_solution() {
  auto p = [](const char* n) { return Expr(Symbol::parameter(n)); };
  Expr x(Symbol::independent("x"));
  Expr y(Symbol::independent("y"));
  Expr u(Symbol::dependent("u"));
  Expr f(Symbol::dependent("f"));
  return {p("c1") * y + p("c2"), -p("c1") * x + p("c3"), p("c4"), p("c5") * u + f2({}), p("c5") * f + f2_image()};
}

Expr instantiate_ansatz(const Expr& e, const std::array<Expr, 5>& solution) {
  std::vector<Symbol> params(base_coordinates().begin(), base_coordinates().end());
  Expr out = e;
  for (std::size_t k = 0; k < 5; ++k) out = instantiate_function(out, kAnsatzNames[k], params, solution[k]);
  return out;
}

DeterminingSystem determining_equations(const Generator& ansatz, const PDEInstance& pde) {
  Prolongation pr(ansatz, 3);
  Expr r = apply_prolonged(pr, pde.residual);

  // Restrict to the equation manifold by eliminating u_tt, keeping f and its
  // jets as free coordinates for the split.
  Symbol utt = Symbol::jet("u", {IndexVar::T, IndexVar::T});
  Expr k = partial(pde.residual, utt);
  auto kc = k.constant_value();
  if (!kc || kc->is_zero()) throw std::invalid_argument("equation must be linear in u_tt with constant coefficient");
  Expr utt_value = Expr(utt) - pde.residual * Expr(Rational(1) / *kc);
  r = substitute_simultaneous(r, {{utt, utt_value}});

  auto is_jet = [](const AtomNode& n) {
    return n.kind == AtomKind::Symbol && n.symbol->kind() == SymbolKind::Jet &&
           (n.symbol->base() == "u" || n.symbol->base() == "f");
  };
  auto groups = collect(r, is_jet);
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    std::size_t da = degree(a.first), db = degree(b.first);
    if (da != db) return da < db;
    return compare(a.first, b.first) < 0;
  });

  DeterminingSystem sys;
  sys.raw_count = groups.size();
  struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
  };
  std::set<Expr, ExprLess> seen;
  for (auto& [mono, coeff] : groups) {
    Expr eq = coeff * Expr(Rational(1) / coeff.terms().front().coeff);
    if (!seen.insert(eq).second) continue;
    sys.equations.push_back({mono, eq});
  }
  return sys;
}

}  // namespace liesym
