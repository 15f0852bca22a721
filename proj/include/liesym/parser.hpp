#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "liesym/expr.hpp"

namespace liesym {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at byte " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
public:
  UnknownIdentifierError(const std::string& name, std::size_t offset, const std::string& table)
      : ParseError("unknown identifier '" + name + "' (declared: " + table + ")", offset), name_(name) {}
  [[nodiscard]] const std::string& name() const { return name_; }

private:
  std::string name_;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> params;
};

/// Names the parser may resolve: plain symbols (with their kind) and opaque
/// functions with named parameters.
class SymbolTable {
public:
  /// x, y, t, xi, eta; u, f, h, g; a, b, s, eps, delta, c1..c5; F2(x, y, t).
  static SymbolTable standard();

  SymbolTable& declare(const Symbol& s);
  SymbolTable& declare_function(FunctionDecl f);

  [[nodiscard]] std::optional<Symbol> lookup(std::string_view name) const;
  [[nodiscard]] const FunctionDecl* function(std::string_view name) const;
  [[nodiscard]] std::string describe() const;

private:
  std::map<std::string, Symbol, std::less<>> symbols_;
  std::map<std::string, FunctionDecl, std::less<>> functions_;
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' (integer | '(' rational ')'))?
///   base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///   ident  := letter (letter|digit)* ('_' jetindices)?
/// Jet subscripts are any run of x, y, t, xi, eta; for an opaque function
/// they name its declared parameters (F2_xt(x, y, t)).
Expr parse(std::string_view text, const SymbolTable& table = SymbolTable::standard());

}  // namespace liesym
