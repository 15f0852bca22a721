#include <doctest.h>

#include "liesym/parser.hpp"

using namespace liesym;

TEST_CASE("precedence and associativity") {
  CHECK(parse("1 + 2*3") == Expr(7));
  CHECK(parse("(1 + 2)*3") == Expr(9));
  CHECK(parse("8/2/2") == Expr(2));
  CHECK(parse("2^3") == Expr(8));
  CHECK(parse("-x^2") == -parse("x^2"));
  CHECK(parse("- - x") == parse("x"));
  CHECK(parse("2*-x") == parse("-2*x"));
  CHECK(parse("x^(-1)") == parse("1/x"));
  CHECK(parse("x^(3/2)") == parse("x*sqrt(x)"));
}

TEST_CASE("numbers") {
  CHECK(parse("0.25") == Expr(Rational(1, 4)));
  CHECK(parse("12") == Expr(12));
  CHECK(parse("3/6") == Expr(Rational(1, 2)));
}

TEST_CASE("the model residual") {
  Expr r = parse("u_tt - a*(u_xxt + u_yyt) - b*(u_xx + u_yy) - f");
  CHECK(r.terms().size() == 6);
  CHECK(r == parse("-f - b*u_yy - b*u_xx - a*u_yyt - a*u_xxt + u_tt"));
}

TEST_CASE("jet subscripts") {
  CHECK(parse("u_xxt").as_symbol()->order() == 3);
  CHECK(parse("h_xieta") == parse("h_etaxi"));
  CHECK(parse("h_xixi").as_symbol()->indices() == std::vector<IndexVar>{IndexVar::Xi, IndexVar::Xi});
  CHECK(parse("h_etaetaeta").as_symbol()->order() == 3);
  CHECK(parse("f_t") == Expr(Symbol::jet("f", {IndexVar::T})));
  CHECK_THROWS_AS(parse("u_xxtxy"), ParseError);
  CHECK_THROWS_AS(parse("u_xq"), ParseError);
  CHECK_THROWS_AS(parse("a_x"), ParseError);
}

TEST_CASE("functions") {
  CHECK(parse("atan(x)") == parse("arctan(x)"));
  CHECK(parse("atan2(y, x)").str() == "atan2(y, x)");
  CHECK(parse("F2_tx(x, y, t)") == parse("F2_xt(x, y, t)"));
  CHECK(parse("F2(x, y, 0)").str() == "F2(x, y, 0)");
  CHECK_THROWS_AS(parse("sin(x, y)"), ParseError);
  CHECK_THROWS_AS(parse("F2(x, y)"), ParseError);
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse("x + * y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("(x + y"), ParseError);
  CHECK_THROWS_AS(parse("x y"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("x $ y"), ParseError);
}

TEST_CASE("unknown identifiers list the table") {
  try {
    parse("x + zeta");
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifierError& e) {
    CHECK(e.name() == "zeta");
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
}

TEST_CASE("custom tables") {
  SymbolTable t = SymbolTable::standard();
  t.declare(Symbol::parameter("k"));
  t.declare_function({"G", {"t"}});
  CHECK(parse("k*G_t(t)", t).str() == "k*G_t(t)");
  CHECK_THROWS_AS(parse("k"), UnknownIdentifierError);
}
