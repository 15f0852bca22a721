#include "liesym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace liesym {

// ---------------------------------------------------------------- symbols

std::string_view index_name(IndexVar v) {
  switch (v) {
    case IndexVar::X: return "x";
    case IndexVar::Y: return "y";
    case IndexVar::T: return "t";
    case IndexVar::Xi: return "xi";
    case IndexVar::Eta: return "eta";
  }
  return "?";
}

std::optional<IndexVar> index_from_name(std::string_view name) {
  if (name == "x") return IndexVar::X;
  if (name == "y") return IndexVar::Y;
  if (name == "t") return IndexVar::T;
  if (name == "xi") return IndexVar::Xi;
  if (name == "eta") return IndexVar::Eta;
  return std::nullopt;
}

Symbol Symbol::independent(std::string name) { return {std::move(name), SymbolKind::Independent, {}}; }
Symbol Symbol::dependent(std::string name) { return {std::move(name), SymbolKind::Dependent, {}}; }
Symbol Symbol::parameter(std::string name) { return {std::move(name), SymbolKind::Parameter, {}}; }

Symbol Symbol::jet(std::string base, std::vector<IndexVar> indices) {
  if (indices.empty()) return dependent(std::move(base));
  if (indices.size() > kMaxJetOrder) {
    throw JetOrderError("jet order " + std::to_string(indices.size()) + " of '" + base + "' exceeds cap " +
                        std::to_string(kMaxJetOrder));
  }
  std::sort(indices.begin(), indices.end());
  return {std::move(base), SymbolKind::Jet, std::move(indices)};
}

std::string Symbol::name() const {
  if (indices_.empty()) return base_;
  std::string out = base_ + "_";
  for (auto v : indices_) out += index_name(v);
  return out;
}

Symbol Symbol::derive(IndexVar v) const {
  if (!is_differential()) throw std::logic_error("cannot take a jet of non-dependent symbol " + name());
  auto idx = indices_;
  idx.push_back(v);
  return jet(base_, std::move(idx));
}

std::optional<IndexVar> Symbol::as_index() const {
  if (kind_ != SymbolKind::Independent) return std::nullopt;
  return index_from_name(base_);
}

std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
  auto rank = [](SymbolKind k) { return k == SymbolKind::Jet ? 2 : static_cast<int>(k); };
  if (auto c = rank(a.kind_) <=> rank(b.kind_); c != 0) return c;
  if (auto c = a.base_ <=> b.base_; c != 0) return c;
  if (auto c = a.indices_.size() <=> b.indices_.size(); c != 0) return c;
  return a.indices_ <=> b.indices_;
}

// ---------------------------------------------------------------- ordering

namespace {

int sgn(std::strong_ordering o) { return o < 0 ? -1 : (o > 0 ? 1 : 0); }

int compare_args(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  return 0;
}

}  // namespace

int compare(const Atom& a, const Atom& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case AtomKind::Symbol: return sgn(*a->symbol <=> *b->symbol);
    case AtomKind::Function: {
      if (a->function->func != b->function->func) return a->function->func < b->function->func ? -1 : 1;
      return compare_args(a->function->args, b->function->args);
    }
    case AtomKind::Arbitrary: {
      const auto& x = *a->arbitrary;
      const auto& y = *b->arbitrary;
      if (int c = x.name.compare(y.name); c != 0) return c < 0 ? -1 : 1;
      if (x.derivs.size() != y.derivs.size()) return x.derivs.size() < y.derivs.size() ? -1 : 1;
      if (x.derivs != y.derivs) return x.derivs < y.derivs ? -1 : 1;
      if (x.params != y.params) return x.params < y.params ? -1 : 1;
      return compare_args(x.args, y.args);
    }
    case AtomKind::Group: return compare(*a->group, *b->group);
  }
  return 0;
}

int compare(const Monomial& a, const Monomial& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i].first, b[i].first); c != 0) return c;
    if (a[i].second != b[i].second) return a[i].second > b[i].second ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

int compare(const Expr& a, const Expr& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  if (&x == &y) return 0;
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(x[i].mono, y[i].mono); c != 0) return c;
    if (x[i].coeff != y[i].coeff) return x[i].coeff < y[i].coeff ? -1 : 1;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------- construction

struct ExprAccess {
  static Expr make(std::vector<Term> t) { return Expr(std::make_shared<const std::vector<Term>>(std::move(t))); }
};

namespace {

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

using Accumulator = std::map<Monomial, Rational, MonoLess>;

Expr from_accumulator(Accumulator& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (!c.is_zero()) out.push_back(Term{c, m});
  }
  return ExprAccess::make(std::move(out));
}

Atom make_symbol_atom(const Symbol& s) {
  auto n = std::make_shared<AtomNode>();
  n->kind = AtomKind::Symbol;
  n->symbol = s;
  return n;
}

Atom make_group_atom(const Expr& base) {
  auto n = std::make_shared<AtomNode>();
  n->kind = AtomKind::Group;
  n->group = base;
  return n;
}

Monomial multiply_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare(a[i].first, b[j].first);
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      out.push_back(b[j++]);
    } else {
      Rational e = a[i].second + b[j].second;
      if (!e.is_zero()) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return out;
}

bool needs_expansion(const Monomial& m) {
  for (const auto& [atom, e] : m) {
    if (atom->kind == AtomKind::Group && e.is_integer() && e.sign() > 0) return true;
    if (atom->kind == AtomKind::Function && atom->function->func == Func::Cos && e.is_integer() && e.num() >= 2)
      return true;
  }
  return false;
}

Expr expand_term(const Rational& c, const Monomial& m);

void accumulate_term(Accumulator& acc, const Rational& c, Monomial m) {
  if (c.is_zero()) return;
  if (needs_expansion(m)) {
    Expr ex = expand_term(c, m);
    for (const auto& t : ex.terms()) acc[t.mono] += t.coeff;
    return;
  }
  auto [it, inserted] = acc.try_emplace(std::move(m), c);
  if (!inserted) it->second += c;
}

Expr mul_impl(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  Accumulator acc;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      accumulate_term(acc, ta.coeff * tb.coeff, multiply_monomials(ta.mono, tb.mono));
    }
  }
  return from_accumulator(acc);
}

// Rewrites Group^n (n > 0 integer) by multiplying out and cos^k (k >= 2) via
// cos^2 = 1 - sin^2.
Expr expand_term(const Rational& c, const Monomial& m) {
  Monomial rest;
  Expr product(c);
  for (const auto& [atom, e] : m) {
    if (atom->kind == AtomKind::Group && e.is_integer() && e.sign() > 0) {
      Expr base = *atom->group;
      Expr p(1);
      for (std::int64_t k = 0; k < e.num(); ++k) p = mul_impl(p, base);
      product = mul_impl(product, p);
    } else if (atom->kind == AtomKind::Function && atom->function->func == Func::Cos && e.is_integer() &&
               e.num() >= 2) {
      const Expr& arg = atom->function->args[0];
      Expr s = sin(arg);
      Expr one_minus = Expr(1) - mul_impl(s, s);
      Expr p(1);
      for (std::int64_t k = 0; k < e.num() / 2; ++k) p = mul_impl(p, one_minus);
      if (e.num() % 2 == 1) p = mul_impl(p, Expr::from_terms({Term{Rational(1), Monomial{{atom, Rational(1)}}}}));
      product = mul_impl(product, p);
    } else {
      rest.emplace_back(atom, e);
    }
  }
  return mul_impl(product, ExprAccess::make({Term{Rational(1), rest}}));
}

Expr single_factor(const Atom& a, const Rational& e) {
  Accumulator acc;
  accumulate_term(acc, Rational(1), Monomial{{a, e}});
  return from_accumulator(acc);
}

Atom make_function_atom(Func f, std::vector<Expr> args) {
  auto n = std::make_shared<AtomNode>();
  n->kind = AtomKind::Function;
  n->function = FunctionAtom{f, std::move(args)};
  return n;
}

// A single term with a negative coefficient (odd/even symmetry normalization).
bool leading_negative(const Expr& a) { return !a.is_zero() && a.terms().front().coeff.is_negative(); }

std::pair<Expr, Expr> split_first(const Expr& a) {
  const auto& t = a.terms();
  Expr first = ExprAccess::make({t.front()});
  std::vector<Term> rest(t.begin() + 1, t.end());
  return {first, ExprAccess::make(std::move(rest))};
}

}  // namespace

Expr::Expr() : terms_(std::make_shared<const std::vector<Term>>()) {}

Expr::Expr(Rational c)
    : terms_(c.is_zero() ? std::make_shared<const std::vector<Term>>()
                         : std::make_shared<const std::vector<Term>>(std::vector<Term>{Term{c, {}}})) {}

Expr::Expr(const Symbol& s)
    : terms_(std::make_shared<const std::vector<Term>>(
          std::vector<Term>{Term{Rational(1), Monomial{{make_symbol_atom(s), Rational(1)}}}})) {}

Expr Expr::from_terms(std::vector<Term> terms) {
  Accumulator acc;
  for (auto& t : terms) {
    // Merge repeated atoms inside a hand-built monomial.
    Monomial m;
    for (auto& f : t.mono) m = multiply_monomials(m, Monomial{f});
    accumulate_term(acc, t.coeff, std::move(m));
  }
  return from_accumulator(acc);
}

Expr Expr::function(Func f, std::vector<Expr> args) {
  switch (f) {
    case Func::Sin: return sin(args.at(0));
    case Func::Cos: return cos(args.at(0));
    case Func::Exp: return exp(args.at(0));
    case Func::Arctan: return arctan(args.at(0));
    case Func::Atan2: return atan2(args.at(0), args.at(1));
  }
  throw std::logic_error("unknown function");
}

Expr Expr::arbitrary(std::string name, std::vector<std::string> params, std::vector<int> derivs,
                     std::vector<Expr> args) {
  if (params.size() != args.size()) {
    throw std::invalid_argument("function " + name + " expects " + std::to_string(params.size()) + " arguments");
  }
  for (int d : derivs) {
    if (d < 0 || static_cast<std::size_t>(d) >= params.size())
      throw std::invalid_argument("bad derivative index for " + name);
  }
  std::sort(derivs.begin(), derivs.end());
  auto n = std::make_shared<AtomNode>();
  n->kind = AtomKind::Arbitrary;
  n->arbitrary = ArbitraryAtom{std::move(name), std::move(params), std::move(derivs), std::move(args)};
  return single_factor(n, Rational(1));
}

bool Expr::is_constant() const { return terms_->empty() || (terms_->size() == 1 && terms_->front().mono.empty()); }

std::optional<Rational> Expr::constant_value() const {
  if (terms_->empty()) return Rational(0);
  if (terms_->size() == 1 && terms_->front().mono.empty()) return terms_->front().coeff;
  return std::nullopt;
}

std::optional<Symbol> Expr::as_symbol() const {
  if (terms_->size() != 1) return std::nullopt;
  const auto& t = terms_->front();
  if (!t.coeff.is_one() || t.mono.size() != 1 || !t.mono[0].second.is_one()) return std::nullopt;
  if (t.mono[0].first->kind != AtomKind::Symbol) return std::nullopt;
  return *t.mono[0].first->symbol;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    int c = compare(x[i].mono, y[j].mono);
    if (c < 0) {
      out.push_back(x[i++]);
    } else if (c > 0) {
      out.push_back(y[j++]);
    } else {
      Rational s = x[i].coeff + y[j].coeff;
      if (!s.is_zero()) out.push_back(Term{s, x[i].mono});
      ++i;
      ++j;
    }
  }
  while (i < x.size()) out.push_back(x[i++]);
  while (j < y.size()) out.push_back(y[j++]);
  return ExprAccess::make(std::move(out));
}

Expr Expr::operator-() const {
  std::vector<Term> out = *terms_;
  for (auto& t : out) t.coeff = -t.coeff;
  return ExprAccess::make(std::move(out));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  const Expr* scaled = nullptr;
  std::optional<Rational> c;
  if ((c = b.constant_value())) {
    scaled = &a;
  } else if ((c = a.constant_value())) {
    scaled = &b;
  }
  if (scaled) {
    std::vector<Term> out = scaled->terms();
    for (auto& t : out) t.coeff *= *c;
    return ExprAccess::make(std::move(out));
  }
  return mul_impl(a, b);
}

Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, Rational(-1)); }

Expr pow(const Expr& base, const Rational& p) {
  if (p.is_zero()) return Expr(1);
  if (base.is_zero()) {
    if (p.sign() > 0) return Expr();
    throw std::domain_error("division by zero");
  }
  const auto& terms = base.terms();
  if (terms.size() == 1) {
    const Term& t = terms.front();
    if (p.is_integer()) {
      Monomial m = t.mono;
      for (auto& f : m) f.second *= p;
      Accumulator acc;
      accumulate_term(acc, t.coeff.pow(p.num()), std::move(m));
      return from_accumulator(acc);
    }
    auto cp = t.coeff.exact_pow(p);
    if (t.mono.empty()) {
      if (cp) return Expr(*cp);
      if (t.coeff.is_negative() && p.den() % 2 == 0) throw std::domain_error("even root of a negative number");
      return single_factor(make_group_atom(base), p);
    }
    if (cp && t.mono.size() == 1) {
      const Rational& e = t.mono[0].second;
      bool even_power = e.is_integer() && e.num() % 2 == 0;
      if (!even_power) {
        Accumulator acc;
        accumulate_term(acc, *cp, Monomial{{t.mono[0].first, e * p}});
        return from_accumulator(acc);
      }
    }
    return single_factor(make_group_atom(base), p);
  }
  if (p.is_integer() && p.sign() > 0) {
    Expr result(1);
    Expr b = base;
    std::int64_t e = p.num();
    while (e > 0) {
      if (e & 1) result = mul_impl(result, b);
      e >>= 1;
      if (e > 0) b = mul_impl(b, b);
    }
    return result;
  }
  // Opaque power of a sum: pull out the leading coefficient when exact.
  Rational lc = terms.front().coeff;
  std::optional<Rational> lcp;
  if (p.is_integer() || !lc.is_negative()) lcp = lc.exact_pow(p);
  if (lcp) {
    Expr normalized = base * Expr(Rational(1) / lc);
    return Expr(*lcp) * single_factor(make_group_atom(normalized), p);
  }
  return single_factor(make_group_atom(base), p);
}

Expr sin(const Expr& a) {
  if (a.is_zero()) return Expr();
  if (a.terms().size() > 1) {
    auto [first, rest] = split_first(a);
    return sin(first) * cos(rest) + cos(first) * sin(rest);
  }
  if (leading_negative(a)) return -sin(-a);
  return single_factor(make_function_atom(Func::Sin, {a}), Rational(1));
}

Expr cos(const Expr& a) {
  if (a.is_zero()) return Expr(1);
  if (a.terms().size() > 1) {
    auto [first, rest] = split_first(a);
    return cos(first) * cos(rest) - sin(first) * sin(rest);
  }
  if (leading_negative(a)) return cos(-a);
  return single_factor(make_function_atom(Func::Cos, {a}), Rational(1));
}

Expr exp(const Expr& a) {
  if (a.is_zero()) return Expr(1);
  return single_factor(make_function_atom(Func::Exp, {a}), Rational(1));
}

Expr arctan(const Expr& a) {
  if (a.is_zero()) return Expr();
  if (a.terms().size() == 1 && leading_negative(a)) return -arctan(-a);
  return single_factor(make_function_atom(Func::Arctan, {a}), Rational(1));
}

Expr atan2(const Expr& y, const Expr& x) {
  if (y.is_zero()) {
    if (auto c = x.constant_value(); c && c->sign() > 0) return Expr();
  }
  return single_factor(make_function_atom(Func::Atan2, {y, x}), Rational(1));
}

Expr sqrt(const Expr& a) { return pow(a, Rational(1, 2)); }

Expr monomial_expr(const Monomial& m) { return Expr::from_terms({Term{Rational(1), m}}); }

// ---------------------------------------------------------------- rebuild / substitute

namespace {

// Rebuilds e applying `map_atom` to each atom (nullopt keeps the atom).
template <typename F>
Expr rebuild(const Expr& e, F&& map_atom) {
  bool any_changed = false;
  std::vector<Term> pending;
  Expr total;
  for (const auto& t : e.terms()) {
    Expr prod(t.coeff);
    Monomial kept;
    bool changed = false;
    for (const auto& [atom, ex] : t.mono) {
      std::optional<Expr> repl = map_atom(atom);
      if (!repl) {
        kept.emplace_back(atom, ex);
        continue;
      }
      changed = true;
      prod = prod * pow(*repl, ex);
    }
    if (!changed) {
      pending.push_back(t);
      continue;
    }
    any_changed = true;
    total = total + prod * ExprAccess::make({Term{Rational(1), kept}});
  }
  if (!any_changed) return e;
  return total + ExprAccess::make(std::move(pending));
}

std::optional<Expr> substitute_atom(const Atom& a, const Bindings& b, std::map<const AtomNode*, std::optional<Expr>>& memo);

Expr substitute_impl(const Expr& e, const Bindings& b, std::map<const AtomNode*, std::optional<Expr>>& memo) {
  return rebuild(e, [&](const Atom& a) { return substitute_atom(a, b, memo); });
}

std::vector<Expr> substitute_args(const std::vector<Expr>& args, const Bindings& b, bool& changed,
                                  std::map<const AtomNode*, std::optional<Expr>>& memo) {
  std::vector<Expr> out;
  out.reserve(args.size());
  for (const auto& arg : args) {
    out.push_back(substitute_impl(arg, b, memo));
    if (!(out.back() == arg)) changed = true;
  }
  return out;
}

std::optional<Expr> substitute_atom(const Atom& a, const Bindings& b, std::map<const AtomNode*, std::optional<Expr>>& memo) {
  if (auto it = memo.find(a.get()); it != memo.end()) return it->second;
  std::optional<Expr> result;
  switch (a->kind) {
    case AtomKind::Symbol: {
      if (auto it = b.find(*a->symbol); it != b.end()) result = it->second;
      break;
    }
    case AtomKind::Function: {
      bool changed = false;
      auto args = substitute_args(a->function->args, b, changed, memo);
      if (changed) result = Expr::function(a->function->func, std::move(args));
      break;
    }
    case AtomKind::Arbitrary: {
      bool changed = false;
      auto args = substitute_args(a->arbitrary->args, b, changed, memo);
      if (changed) {
        const auto& f = *a->arbitrary;
        result = Expr::arbitrary(f.name, f.params, f.derivs, std::move(args));
      }
      break;
    }
    case AtomKind::Group: {
      Expr inner = substitute_impl(*a->group, b, memo);
      if (!(inner == *a->group)) result = inner;
      break;
    }
  }
  memo.emplace(a.get(), result);
  return result;
}

void collect_symbols(const Expr& e, std::set<Symbol>& out);

void collect_atom_symbols(const Atom& a, std::set<Symbol>& out) {
  switch (a->kind) {
    case AtomKind::Symbol: out.insert(*a->symbol); break;
    case AtomKind::Function:
      for (const auto& arg : a->function->args) collect_symbols(arg, out);
      break;
    case AtomKind::Arbitrary:
      for (const auto& arg : a->arbitrary->args) collect_symbols(arg, out);
      break;
    case AtomKind::Group: collect_symbols(*a->group, out); break;
  }
}

void collect_symbols(const Expr& e, std::set<Symbol>& out) {
  for (const auto& t : e.terms())
    for (const auto& f : t.mono) collect_atom_symbols(f.first, out);
}

}  // namespace

Expr canonicalize(const Expr& e) {
  // Reconstruct every node through the public constructors.
  std::map<const AtomNode*, std::optional<Expr>> memo;
  std::function<Expr(const Expr&)> rec;
  std::function<Expr(const Atom&)> rec_atom = [&](const Atom& a) -> Expr {
    switch (a->kind) {
      case AtomKind::Symbol: return Expr(*a->symbol);
      case AtomKind::Function: {
        std::vector<Expr> args;
        for (const auto& x : a->function->args) args.push_back(rec(x));
        return Expr::function(a->function->func, std::move(args));
      }
      case AtomKind::Arbitrary: {
        std::vector<Expr> args;
        for (const auto& x : a->arbitrary->args) args.push_back(rec(x));
        const auto& f = *a->arbitrary;
        return Expr::arbitrary(f.name, f.params, f.derivs, std::move(args));
      }
      case AtomKind::Group: return rec(*a->group);
    }
    return Expr();
  };
  rec = [&](const Expr& x) -> Expr {
    Expr total;
    for (const auto& t : x.terms()) {
      Expr prod(t.coeff);
      for (const auto& [atom, ex] : t.mono) prod = prod * pow(rec_atom(atom), ex);
      total = total + prod;
    }
    return total;
  };
  return rec(e);
}

std::set<Symbol> free_symbols(const Expr& e) {
  std::set<Symbol> out;
  collect_symbols(e, out);
  return out;
}

bool depends_on(const Expr& e, const Symbol& s) { return free_symbols(e).count(s) > 0; }

bool contains_atom(const Expr& e, const std::function<bool(const AtomNode&)>& pred) {
  for (const auto& t : e.terms()) {
    for (const auto& [a, ex] : t.mono) {
      if (pred(*a)) return true;
      switch (a->kind) {
        case AtomKind::Symbol: break;
        case AtomKind::Function:
          for (const auto& arg : a->function->args)
            if (contains_atom(arg, pred)) return true;
          break;
        case AtomKind::Arbitrary:
          for (const auto& arg : a->arbitrary->args)
            if (contains_atom(arg, pred)) return true;
          break;
        case AtomKind::Group:
          if (contains_atom(*a->group, pred)) return true;
          break;
      }
    }
  }
  return false;
}

Expr substitute_simultaneous(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return e;
  std::map<const AtomNode*, std::optional<Expr>> memo;
  return substitute_impl(e, bindings, memo);
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  // Depth-first search for a cycle in key -> (keys mentioned by value).
  std::map<Symbol, std::vector<Symbol>> edges;
  for (const auto& [k, v] : bindings) {
    for (const auto& s : free_symbols(v))
      if (bindings.count(s)) edges[k].push_back(s);
  }
  std::map<Symbol, int> state;  // 0 new, 1 on stack, 2 done
  std::function<void(const Symbol&)> visit = [&](const Symbol& s) {
    state[s] = 1;
    for (const auto& n : edges[s]) {
      if (state[n] == 1) throw SubstitutionCycleError("cyclic substitution through '" + n.name() + "'");
      if (state[n] == 0) visit(n);
    }
    state[s] = 2;
  };
  for (const auto& [k, v] : bindings)
    if (state[k] == 0) visit(k);
  return substitute_simultaneous(e, bindings);
}

Expr instantiate_function(const Expr& e, const std::string& name, const std::vector<Symbol>& params,
                          const Expr& body) {
  std::map<std::vector<int>, Expr> derivative_cache;
  auto derivative_of_body = [&](const std::vector<int>& derivs) -> const Expr& {
    auto it = derivative_cache.find(derivs);
    if (it != derivative_cache.end()) return it->second;
    Expr d = body;
    for (int k : derivs) d = partial(d, params.at(static_cast<std::size_t>(k)));
    return derivative_cache.emplace(derivs, d).first->second;
  };
  std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
    return rebuild(x, [&](const Atom& a) -> std::optional<Expr> {
      switch (a->kind) {
        case AtomKind::Symbol: return std::nullopt;
        case AtomKind::Function: {
          std::vector<Expr> args;
          bool changed = false;
          for (const auto& arg : a->function->args) {
            args.push_back(rec(arg));
            if (!(args.back() == arg)) changed = true;
          }
          if (!changed) return std::nullopt;
          return Expr::function(a->function->func, std::move(args));
        }
        case AtomKind::Arbitrary: {
          const auto& f = *a->arbitrary;
          std::vector<Expr> args;
          for (const auto& arg : f.args) args.push_back(rec(arg));
          if (f.name == name) {
            if (params.size() != args.size())
              throw std::invalid_argument("arity mismatch instantiating " + name);
            Bindings b;
            for (std::size_t i = 0; i < params.size(); ++i) b.emplace(params[i], args[i]);
            return substitute_simultaneous(derivative_of_body(f.derivs), b);
          }
          return Expr::arbitrary(f.name, f.params, f.derivs, std::move(args));
        }
        case AtomKind::Group: {
          Expr inner = rec(*a->group);
          if (inner == *a->group) return std::nullopt;
          return inner;
        }
      }
      return std::nullopt;
    });
  };
  return rec(e);
}

// ---------------------------------------------------------------- differentiation

namespace {

Expr differentiate_atom(const Atom& a, const SymbolDerivative& dsym, std::map<const AtomNode*, Expr>& memo);

Expr differentiate_impl(const Expr& e, const SymbolDerivative& dsym, std::map<const AtomNode*, Expr>& memo) {
  Expr total;
  for (const auto& t : e.terms()) {
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      const auto& [atom, ex] = t.mono[i];
      Expr da = differentiate_atom(atom, dsym, memo);
      if (da.is_zero()) continue;
      Monomial rest = t.mono;
      Rational reduced = ex - Rational(1);
      if (reduced.is_zero()) {
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        rest[i].second = reduced;
      }
      total = total + Expr::from_terms({Term{t.coeff * ex, rest}}) * da;
    }
  }
  return total;
}

Expr differentiate_atom(const Atom& a, const SymbolDerivative& dsym, std::map<const AtomNode*, Expr>& memo) {
  if (auto it = memo.find(a.get()); it != memo.end()) return it->second;
  Expr result;
  switch (a->kind) {
    case AtomKind::Symbol: result = dsym(*a->symbol); break;
    case AtomKind::Function: {
      const auto& args = a->function->args;
      switch (a->function->func) {
        case Func::Sin: result = cos(args[0]) * differentiate_impl(args[0], dsym, memo); break;
        case Func::Cos: result = -sin(args[0]) * differentiate_impl(args[0], dsym, memo); break;
        case Func::Exp: result = exp(args[0]) * differentiate_impl(args[0], dsym, memo); break;
        case Func::Arctan: {
          Expr d = differentiate_impl(args[0], dsym, memo);
          if (!d.is_zero()) result = d * pow(Expr(1) + args[0] * args[0], Rational(-1));
          break;
        }
        case Func::Atan2: {
          const Expr& y = args[0];
          const Expr& x = args[1];
          Expr dy = differentiate_impl(y, dsym, memo);
          Expr dx = differentiate_impl(x, dsym, memo);
          Expr num = x * dy - y * dx;
          if (!num.is_zero()) result = num * pow(x * x + y * y, Rational(-1));
          break;
        }
      }
      break;
    }
    case AtomKind::Arbitrary: {
      const auto& f = *a->arbitrary;
      for (std::size_t k = 0; k < f.args.size(); ++k) {
        Expr d = differentiate_impl(f.args[k], dsym, memo);
        if (d.is_zero()) continue;
        auto derivs = f.derivs;
        derivs.push_back(static_cast<int>(k));
        result = result + Expr::arbitrary(f.name, f.params, derivs, f.args) * d;
      }
      break;
    }
    case AtomKind::Group: result = differentiate_impl(*a->group, dsym, memo); break;
  }
  memo.emplace(a.get(), result);
  return result;
}

}  // namespace

Expr differentiate(const Expr& e, const SymbolDerivative& dsym) {
  std::map<const AtomNode*, Expr> memo;
  return differentiate_impl(e, dsym, memo);
}

Expr partial(const Expr& e, const Symbol& s) {
  return differentiate(e, [&](const Symbol& x) { return x == s ? Expr(1) : Expr(); });
}

Expr total_derivative(const Expr& e, IndexVar v) {
  return differentiate(e, [&](const Symbol& s) -> Expr {
    if (s.is_differential()) return Expr(s.derive(v));
    if (auto iv = s.as_index(); iv && *iv == v) return Expr(1);
    return Expr();
  });
}

// ---------------------------------------------------------------- numeric

namespace {

double real_pow(double b, const Rational& p) {
  if (p.is_integer()) {
    if (b == 0.0 && p.is_negative()) throw std::domain_error("division by zero");
    return std::pow(b, static_cast<double>(p.num()));
  }
  if (b < 0.0) {
    if (p.den() % 2 == 0) throw std::domain_error("even root of a negative number");
    double mag = std::pow(-b, p.to_double());
    return (p.num() % 2 == 0) ? mag : -mag;
  }
  if (b == 0.0 && p.is_negative()) throw std::domain_error("division by zero");
  return std::pow(b, p.to_double());
}

class Evaluator {
public:
  explicit Evaluator(const Assignment& a) : a_(a) {}

  double eval(const Expr& e) {
    double total = 0.0;
    for (const auto& t : e.terms()) {
      double prod = t.coeff.to_double();
      for (const auto& [atom, ex] : t.mono) prod *= real_pow(eval_atom(atom), ex);
      total += prod;
    }
    return total;
  }

private:
  double eval_atom(const Atom& a) {
    if (auto it = memo_.find(a.get()); it != memo_.end()) return it->second;
    double v = 0.0;
    switch (a->kind) {
      case AtomKind::Symbol: {
        auto name = a->symbol->name();
        auto it = a_.values.find(name);
        if (it == a_.values.end()) throw UnassignedSymbolError("unassigned symbol '" + name + "'");
        v = it->second;
        break;
      }
      case AtomKind::Function: {
        const auto& args = a->function->args;
        switch (a->function->func) {
          case Func::Sin: v = std::sin(eval(args[0])); break;
          case Func::Cos: v = std::cos(eval(args[0])); break;
          case Func::Exp: v = std::exp(eval(args[0])); break;
          case Func::Arctan: v = std::atan(eval(args[0])); break;
          case Func::Atan2: v = std::atan2(eval(args[0]), eval(args[1])); break;
        }
        break;
      }
      case AtomKind::Arbitrary: v = eval_arbitrary(a); break;
      case AtomKind::Group: v = eval(*a->group); break;
    }
    if (!std::isfinite(v)) throw std::domain_error("non-finite value");
    memo_.emplace(a.get(), v);
    return v;
  }

  double eval_arbitrary(const Atom& a) {
    const auto& f = *a->arbitrary;
    if (auto it = a_.values.find(atom_str(a)); it != a_.values.end()) return it->second;
    auto sit = a_.functions.find(f.name);
    if (sit == a_.functions.end()) throw UnassignedSymbolError("no value or stand-in for '" + atom_str(a) + "'");
    const StandIn& s = sit->second;
    if (s.params.size() != f.args.size()) throw std::invalid_argument("stand-in arity mismatch for " + f.name);
    Expr d = s.body;
    for (int k : f.derivs) d = partial(d, s.params[static_cast<std::size_t>(k)]);
    Assignment inner = a_;
    for (std::size_t i = 0; i < s.params.size(); ++i) inner.values[s.params[i].name()] = eval(f.args[i]);
    return Evaluator(inner).eval(d);
  }

  const Assignment& a_;
  std::unordered_map<const AtomNode*, double> memo_;
};

void collect_arbitrary_keys(const Expr& e, std::set<std::string>& out) {
  contains_atom(e, [&](const AtomNode& n) {
    if (n.kind == AtomKind::Arbitrary) {
      // atom_str needs an Atom handle; rebuild a lightweight one.
      auto copy = std::make_shared<AtomNode>(n);
      out.insert(atom_str(copy));
    }
    return false;
  });
}

}  // namespace

double eval_numeric(const Expr& e, const Assignment& assignment) { return Evaluator(assignment).eval(e); }

bool equals(const Expr& a, const Expr& b, const EqualsOptions& opts) {
  Expr d = a - b;
  if (d.is_zero()) return true;
  std::set<std::string> keys;
  for (const Expr* side : {&a, &b}) {
    for (const auto& s : free_symbols(*side)) keys.insert(s.name());
    collect_arbitrary_keys(*side, keys);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(opts.lo, opts.hi);
  int ok = 0;
  for (int attempt = 0; attempt < opts.samples * 10 && ok < opts.samples; ++attempt) {
    Assignment asg;
    for (const auto& k : keys) asg.values[k] = dist(rng);
    try {
      double va = eval_numeric(a, asg);
      double vb = eval_numeric(b, asg);
      double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
      if (std::fabs(va - vb) >= opts.tolerance * scale) return false;
      ++ok;
    } catch (const std::domain_error&) {
      continue;
    }
  }
  return ok >= opts.samples;
}

// ---------------------------------------------------------------- collect

std::vector<std::pair<Monomial, Expr>> collect(const Expr& e,
                                               const std::function<bool(const AtomNode&)>& is_coordinate) {
  std::map<Monomial, std::vector<Term>, MonoLess> groups;
  for (const auto& t : e.terms()) {
    Monomial coord;
    Monomial rest;
    for (const auto& f : t.mono) {
      if (is_coordinate(*f.first)) {
        if (!f.second.is_integer() || f.second.sign() < 0)
          throw std::runtime_error("coordinate " + atom_str(f.first) + " occurs with non-polynomial power");
        coord.push_back(f);
      } else {
        bool nested = false;
        switch (f.first->kind) {
          case AtomKind::Function:
            for (const auto& arg : f.first->function->args) nested = nested || contains_atom(arg, is_coordinate);
            break;
          case AtomKind::Arbitrary:
            for (const auto& arg : f.first->arbitrary->args) nested = nested || contains_atom(arg, is_coordinate);
            break;
          case AtomKind::Group: nested = contains_atom(*f.first->group, is_coordinate); break;
          case AtomKind::Symbol: break;
        }
        if (nested) throw std::runtime_error("coordinate nested inside " + atom_str(f.first));
        rest.push_back(f);
      }
    }
    groups[coord].push_back(Term{t.coeff, rest});
  }
  std::vector<std::pair<Monomial, Expr>> out;
  for (auto& [m, ts] : groups) {
    Expr c = Expr::from_terms(std::move(ts));
    if (!c.is_zero()) out.emplace_back(m, c);
  }
  return out;
}

// ---------------------------------------------------------------- printing

namespace {

std::string func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Arctan: return "arctan";
    case Func::Atan2: return "atan2";
  }
  return "?";
}

// Atom text safe to follow with '^'.
std::string atom_base_str(const Atom& a) {
  if (a->kind == AtomKind::Group) {
    const Expr& g = *a->group;
    if (auto c = g.constant_value(); c && c->is_integer() && !c->is_negative()) return c->str();
    return "(" + g.str() + ")";
  }
  return atom_str(a);
}

// Text of the atom raised to a positive exponent.
std::string power_str(const Atom& a, const Rational& e) {
  if (e.is_one()) return atom_base_str(a);
  if (e.is_integer()) return atom_base_str(a) + "^" + e.str();
  if (e.den() == 2) {
    std::string inner = a->kind == AtomKind::Group ? a->group->str() : atom_str(a);
    std::string s = "sqrt(" + inner + ")";
    if (e.num() != 1) s += "^" + std::to_string(e.num());
    return s;
  }
  return atom_base_str(a) + "^(" + e.str() + ")";
}

std::string term_body(const Rational& abs_coeff, const Monomial& m) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  for (const auto& [a, e] : m) {
    if (e.sign() > 0) {
      num.push_back(power_str(a, e));
    } else if (a->kind == AtomKind::Group && e.is_integer() && e.num() < -1) {
      // "/(s)^k" would re-parse as 1/expand(s^k), a different atom.
      num.push_back(atom_base_str(a) + "^(" + e.str() + ")");
    } else {
      den.push_back(power_str(a, -e));
    }
  }
  std::string out;
  if (abs_coeff.num() != 1 || num.empty()) out = std::to_string(abs_coeff.num());
  for (const auto& s : num) {
    if (!out.empty()) out += "*";
    out += s;
  }
  if (abs_coeff.den() != 1) out += "/" + std::to_string(abs_coeff.den());
  for (const auto& s : den) out += "/" + s;
  return out;
}

}  // namespace

std::string atom_str(const Atom& a) {
  switch (a->kind) {
    case AtomKind::Symbol: return a->symbol->name();
    case AtomKind::Function: {
      std::string s = func_name(a->function->func) + "(";
      for (std::size_t i = 0; i < a->function->args.size(); ++i) {
        if (i) s += ", ";
        s += a->function->args[i].str();
      }
      return s + ")";
    }
    case AtomKind::Arbitrary: {
      const auto& f = *a->arbitrary;
      std::string s = f.name;
      if (!f.derivs.empty()) {
        s += "_";
        for (int d : f.derivs) s += f.params[static_cast<std::size_t>(d)];
      }
      s += "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) s += ", ";
        s += f.args[i].str();
      }
      return s + ")";
    }
    case AtomKind::Group: return "(" + a->group->str() + ")";
  }
  return "?";
}

std::string Expr::str() const {
  if (terms_->empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : *terms_) {
    bool neg = t.coeff.is_negative();
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    out += term_body(t.coeff.abs(), t.mono);
    first = false;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace liesym
