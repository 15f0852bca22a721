#include "liesym/parser.hpp"

#include <algorithm>
#include <cctype>

namespace liesym {

SymbolTable SymbolTable::standard() {
  SymbolTable t;
  for (const char* n : {"x", "y", "t", "xi", "eta"}) t.declare(Symbol::independent(n));
  for (const char* n : {"u", "f", "h", "g"}) t.declare(Symbol::dependent(n));
  for (const char* n : {"a", "b", "s", "eps", "delta", "c1", "c2", "c3", "c4", "c5"}) t.declare(Symbol::parameter(n));
  t.declare_function({"F2", {"x", "y", "t"}});
  return t;
}

SymbolTable& SymbolTable::declare(const Symbol& s) {
  if (s.kind() == SymbolKind::Jet) throw std::invalid_argument("declare the base symbol, not a jet");
  symbols_.insert_or_assign(s.base(), s);
  return *this;
}

SymbolTable& SymbolTable::declare_function(FunctionDecl f) {
  std::string key = f.name;
  functions_.insert_or_assign(std::move(key), std::move(f));
  return *this;
}

std::optional<Symbol> SymbolTable::lookup(std::string_view name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

const FunctionDecl* SymbolTable::function(std::string_view name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

std::string SymbolTable::describe() const {
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += ", ";
    out += s;
  };
  for (const auto& [name, sym] : symbols_) add(name);
  for (const auto& [name, f] : functions_) {
    std::string s = name + "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) s += (i ? "," : "") + f.params[i];
    add(s + ")");
  }
  return out;
}

namespace {

// Splits a subscript into names drawn from `alphabet`, longest match first.
std::optional<std::vector<std::string>> split_subscript(std::string_view sub, std::vector<std::string> alphabet) {
  std::sort(alphabet.begin(), alphabet.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < sub.size()) {
    bool matched = false;
    for (const auto& name : alphabet) {
      if (sub.substr(pos, name.size()) == name) {
        out.push_back(name);
        pos += name.size();
        matched = true;
        break;
      }
    }
    if (!matched) return std::nullopt;
  }
  return out;
}

class Parser {
public:
  Parser(std::string_view text, const SymbolTable& table) : text_(text), table_(table) {}

  Expr parse_all() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      if (accept('*')) {
        e = e * factor();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (accept('-')) return -factor();
    std::size_t at = pos_;
    Expr b = base();
    if (accept('^')) {
      Rational p = exponent();
      try {
        return pow(b, p);
      } catch (const std::domain_error& err) {
        throw ParseError(err.what(), at);
      }
    }
    return b;
  }

  Rational exponent() {
    skip_ws();
    if (accept('(')) {
      skip_ws();
      std::size_t start = pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
        ++pos_;
      std::string_view num = text_.substr(start, pos_ - start);
      expect(')');
      try {
        return Rational::parse(num);
      } catch (const std::exception&) {
        throw ParseError("bad exponent", start);
      }
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    return Rational::parse(text_.substr(start, pos_ - start));
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    try {
      return Expr(Rational::parse(text_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> args;
    expect('(');
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  bool next_is_call() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == '(';
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    std::string sub;
    std::size_t sub_at = pos_;
    if (pos_ < text_.size() && text_[pos_] == '_') {
      ++pos_;
      sub_at = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      sub = std::string(text_.substr(sub_at, pos_ - sub_at));
      if (sub.empty()) throw ParseError("empty subscript", sub_at);
    }

    if (sub.empty() && next_is_call()) {
      if (auto f = builtin(name)) {
        std::size_t at = pos_;
        auto args = call_args();
        return apply_builtin(*f, name, std::move(args), at);
      }
    }
    if (const FunctionDecl* decl = table_.function(name)) {
      if (!next_is_call()) throw ParseError("function '" + name + "' needs arguments", pos_);
      std::vector<int> derivs;
      if (!sub.empty()) {
        auto parts = split_subscript(sub, decl->params);
        if (!parts) throw ParseError("subscript '" + sub + "' does not name parameters of " + name, sub_at);
        for (const auto& p : *parts) {
          auto it = std::find(decl->params.begin(), decl->params.end(), p);
          derivs.push_back(static_cast<int>(it - decl->params.begin()));
        }
      }
      std::size_t at = pos_;
      auto args = call_args();
      if (args.size() != decl->params.size()) throw ParseError("wrong number of arguments for " + name, at);
      return Expr::arbitrary(decl->name, decl->params, std::move(derivs), std::move(args));
    }

    auto sym = table_.lookup(name);
    if (!sym) throw UnknownIdentifierError(name, start, table_.describe());
    if (sub.empty()) return Expr(*sym);
    if (!sym->is_differential()) throw ParseError("subscript on non-dependent symbol '" + name + "'", sub_at);
    auto parts = split_subscript(sub, {"x", "y", "t", "xi", "eta"});
    if (!parts) throw ParseError("bad jet subscript '" + sub + "'", sub_at);
    std::vector<IndexVar> idx;
    for (const auto& p : *parts) idx.push_back(*index_from_name(p));
    try {
      return Expr(Symbol::jet(sym->base(), std::move(idx)));
    } catch (const JetOrderError& e) {
      throw ParseError(e.what(), sub_at);
    }
  }

  enum class Builtin { Sin, Cos, Exp, Arctan, Atan2, Sqrt };

  static std::optional<Builtin> builtin(const std::string& name) {
    if (name == "sin") return Builtin::Sin;
    if (name == "cos") return Builtin::Cos;
    if (name == "exp") return Builtin::Exp;
    if (name == "arctan" || name == "atan") return Builtin::Arctan;
    if (name == "atan2") return Builtin::Atan2;
    if (name == "sqrt") return Builtin::Sqrt;
    return std::nullopt;
  }

  static Expr apply_builtin(Builtin f, const std::string& name, std::vector<Expr> args, std::size_t at) {
    std::size_t want = f == Builtin::Atan2 ? 2 : 1;
    if (args.size() != want) throw ParseError(name + " expects " + std::to_string(want) + " argument(s)", at);
    try {
      switch (f) {
        case Builtin::Sin: return sin(args[0]);
        case Builtin::Cos: return cos(args[0]);
        case Builtin::Exp: return exp(args[0]);
        case Builtin::Arctan: return arctan(args[0]);
        case Builtin::Atan2: return atan2(args[0], args[1]);
        case Builtin::Sqrt: return sqrt(args[0]);
      }
    } catch (const std::domain_error& e) {
      throw ParseError(e.what(), at);
    }
    return Expr();
  }

  std::string_view text_;
  const SymbolTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const SymbolTable& table) { return Parser(text, table).parse_all(); }

}  // namespace liesym
