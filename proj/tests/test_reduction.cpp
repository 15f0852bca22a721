#include <doctest.h>

#include "liesym/reduction.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

const PDEInstance kPde = PDEInstance::viscoelastic();

Expr reduced(const char* gen) { return reduce_pde(kPde, characteristic_invariants(parse_generator(gen))).residual; }

}  // namespace

TEST_CASE("invariants of translations") {
  SimilarityChart c1 = characteristic_invariants(parse_generator("X1"));
  CHECK(c1.xi == P("y"));
  CHECK(c1.eta == P("t"));
  SimilarityChart c3 = characteristic_invariants(parse_generator("X3"));
  CHECK(c3.xi == P("x"));
  CHECK(c3.eta == P("y"));
  SimilarityChart c13 = characteristic_invariants(parse_generator("X1 + X3"));
  CHECK(c13.xi == P("x - t"));
  CHECK(c13.eta == P("y"));
  for (const char* g : {"X1", "X2", "X3", "X1 + X3", "X2 + X3", "2*X1 - X2/3 + X3", "X4", "X4 + 2*X3"}) {
    SimilarityChart c = characteristic_invariants(parse_generator(g));
    INFO(g);
    CHECK(c.generator.apply(c.xi).is_zero());
    CHECK(equals(c.generator.apply(c.eta), Expr()));
  }
}

TEST_CASE("rotation invariants") {
  SimilarityChart c = characteristic_invariants(parse_generator("X4"));
  CHECK(c.xi == P("x^2 + y^2"));
  CHECK(c.eta == P("t"));
  SimilarityChart d = characteristic_invariants(parse_generator("X4 + 2*X3"));
  CHECK(d.xi == P("x^2 + y^2"));
  CHECK(equals(d.eta, P("atan2(y, x) + t/2")));
}

TEST_CASE("reduced equations") {
  CHECK(reduced("X1") == P("h_etaeta - a*h_xixieta - b*h_xixi - g"));
  CHECK(reduced("X2") == P("h_etaeta - a*h_xixieta - b*h_xixi - g"));
  CHECK(reduced("X3") == P("-b*(h_xixi + h_etaeta) - g"));
  CHECK(reduced("X1 + X3") == P("h_xixi + a*h_xixixi + a*h_xietaeta - b*h_xixi - b*h_etaeta - g"));
  CHECK(reduced("X2 + X3") == P("h_etaeta + a*h_xixieta + a*h_etaetaeta - b*h_xixi - b*h_etaeta - g"));
  CHECK(reduced("X4") == P("h_etaeta - 4*a*xi*h_xixieta - 4*a*h_xieta - 4*b*xi*h_xixi - 4*b*h_xi - g"));
}

TEST_CASE("reductions pass the numerical check") {
  for (const char* g : {"X1", "X2", "X3", "X1 + X3", "X2 + X3", "X1 - 2*X2 + X3/2", "X4", "X4 + 2*X3", "3*X4 + X3"}) {
    INFO(g);
    SimilarityChart c = characteristic_invariants(parse_generator(g));
    ReductionCheck r = verify_reduction(kPde, c, reduce_pde(kPde, c));
    CHECK(r.passed);
    CHECK(r.max_discrepancy < 1e-7);
    CHECK(r.functions == 10);
    CHECK(r.points == 20);
  }
}

TEST_CASE("wrong reduced equations fail the numerical check") {
  SimilarityChart c = characteristic_invariants(parse_generator("X3"));
  ReducedPDE printed{parse(printed_reduction_table()[2])};
  CHECK_FALSE(verify_reduction(kPde, c, printed).passed);
  CHECK_FALSE(verify_reduction(kPde, c, ReducedPDE{Expr()}).passed);
  ReducedPDE off{reduce_pde(kPde, c).residual + P("h_xi/1000")};
  CHECK_FALSE(verify_reduction(kPde, c, off).passed);
}

TEST_CASE("unsupported generators") {
  CHECK_THROWS_AS(characteristic_invariants(parse_generator("X5")), UnsupportedGeneratorError);
  CHECK_THROWS_AS(characteristic_invariants(Generator()), UnsupportedGeneratorError);
  CHECK_THROWS_AS(characteristic_invariants(parse_generator("X4 + X1")), UnsupportedGeneratorError);
  CHECK_THROWS_AS(characteristic_invariants(parse_generator("t;0;0;0;0")), UnsupportedGeneratorError);
  try {
    characteristic_invariants(parse_generator("X5"));
  } catch (const UnsupportedGeneratorError& e) {
    CHECK(std::string(e.what()).find("k*X4") != std::string::npos);
  }
}

TEST_CASE("make_chart rejects bad invariants") {
  Generator x1 = parse_generator("X1");
  Bindings sec{{Symbol::independent("x"), Expr()},
               {Symbol::independent("y"), P("xi")},
               {Symbol::independent("t"), P("eta")}};
  CHECK_THROWS(make_chart(x1, P("x"), P("t"), sec));
  CHECK_THROWS(make_chart(x1, P("y"), P("2*y"), sec));
  CHECK_THROWS(make_chart(x1, P("y"), P("t + u"), sec));
  CHECK_NOTHROW(make_chart(x1, P("y"), P("t"), sec));
}

TEST_CASE("the reduction does not depend on the choice of chart") {
  // For X1 take (xi, eta) = (y + t, t); the reduced equation changes by the
  // chain rule but still verifies.
  Generator x1 = parse_generator("X1");
  Bindings sec{{Symbol::independent("x"), Expr()},
               {Symbol::independent("y"), P("xi - eta")},
               {Symbol::independent("t"), P("eta")}};
  SimilarityChart c = make_chart(x1, P("y + t"), P("t"), sec);
  ReducedPDE r = reduce_pde(kPde, c);
  CHECK(verify_reduction(kPde, c, r).passed);
  CHECK(r.residual == P("h_xixi + 2*h_xieta + h_etaeta - a*(h_xixixi + h_xixieta) - b*h_xixi - g"));
}

TEST_CASE("reduction is linear in the equation") {
  PDEInstance scaled = PDEInstance::from_residual(P("2*u_tt - 2*a*(u_xxt + u_yyt) - 2*b*(u_xx + u_yy) - f"));
  SimilarityChart c = characteristic_invariants(parse_generator("X1 + X3"));
  Expr twice = reduce_pde(scaled, c).residual;
  Expr once = reduce_pde(kPde, c).residual;
  CHECK(twice + P("g") == Expr(2) * (once + P("g")));
}

TEST_CASE("parameters may be fixed before reducing") {
  PDEInstance p = kPde.with_parameters(Rational(1, 2), Rational(3));
  SimilarityChart c = characteristic_invariants(parse_generator("X4"));
  ReducedPDE r = reduce_pde(p, c);
  CHECK(r.residual == P("h_etaeta - 2*xi*h_xixieta - 2*h_xieta - 12*xi*h_xixi - 12*h_xi - g"));
  CHECK(verify_reduction(p, c, r).passed);
}

TEST_CASE("audit against the published table") {
  ReductionAudit audit = audit_reduction_table();
  REQUIRE(audit.rows.size() == 5);
  for (const auto& row : audit.rows) CHECK_FALSE(row.match);
  CHECK(audit.rows[0].diff_terms == std::vector<std::string>{"-a*h_etaetaeta", "-b*h_etaeta"});
  CHECK(audit.rows[1].diff_terms == audit.rows[0].diff_terms);
  CHECK(audit.rows[2].diff_terms == std::vector<std::string>{"-a*h_xixieta", "-a*h_etaetaeta", "h_etaeta"});
  CHECK(audit.duplicate_rows == std::vector<std::vector<std::size_t>>{{1, 2, 3}});
  CHECK(reduction_table_row(parse_generator("X2 + X3")) == 5);
  CHECK_FALSE(reduction_table_row(parse_generator("X4")).has_value());
}

TEST_CASE("diff_terms lists each differing term") {
  CHECK(diff_terms(P("h_xi + g"), P("h_xi + g")).empty());
  CHECK(diff_terms(P("h_xi + 2*g"), P("h_xi")) == std::vector<std::string>{"2*g"});
}
