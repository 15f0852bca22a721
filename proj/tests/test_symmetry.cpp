#include <doctest.h>

#include <random>

#include "liesym/symmetry.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

Generator random_field(std::mt19937_64& rng) {
  static const char* monos[] = {"1", "x", "y", "t", "u", "x*y", "t*u", "x^2", "f", "y*u"};
  std::uniform_int_distribution<int> coef(-3, 3);
  std::array<Expr, 5> c;
  for (auto& e : c) {
    for (const char* m : monos) {
      int k = coef(rng);
      if (k != 0 && coef(rng) > 1) e += Expr(k) * P(m);
    }
  }
  return Generator(c);
}

const PDEInstance kPde = PDEInstance::viscoelastic();

}  // namespace

TEST_CASE("standard basis") {
  auto b = standard_basis();
  CHECK(b[0].str() == "d_x");
  CHECK(b[3].str() == "y*d_x - x*d_y");
  CHECK(b[4].str() == "u*d_u + f*d_f");
  CHECK(b[3].label() == "X4");
}

TEST_CASE("brackets from the commutator table") {
  auto b = standard_basis();
  CHECK(bracket(b[0], b[3]) == b[1].scaled(Expr(-1)));
  CHECK(bracket(b[1], b[3]) == b[0]);
  CHECK(bracket(b[2], b[4]).is_zero());
}

TEST_CASE("commutator table matches the published one") {
  auto b = standard_basis();
  StructureConstants sc = commutator_table(b);
  const auto& printed = printed_commutator_table();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(sc.cell(i, j) == printed[i][j]);
  CHECK(sc(0, 3, 1) == Rational(-1));
  CHECK(sc(1, 3, 0) == Rational(1));
  CHECK(sc.is_antisymmetric());
  CHECK(sc.satisfies_jacobi());
}

TEST_CASE("center and abelian subalgebras") {
  auto b = standard_basis();
  std::vector<Generator> center{b[2], b[4]};
  CHECK(commutator_table(center).is_zero());
  std::vector<Generator> trans{b[0], b[1]};
  CHECK(commutator_table(trans).is_zero());
}

TEST_CASE("non-closed span names the pair") {
  std::vector<Generator> span{parse_generator("1;0;0;0;0"), parse_generator("0;x;0;0;0")};
  try {
    (void)commutator_table(span);
    FAIL("expected NotClosedError");
  } catch (const NotClosedError& e) {
    CHECK(e.pair() == std::make_pair(std::size_t{0}, std::size_t{1}));
  }
}

TEST_CASE("basis coordinates") {
  auto b = standard_basis();
  auto c = basis_coordinates(parse_generator("X1 + 2*X4 - X5/3"), b);
  REQUIRE(c.has_value());
  CHECK((*c)[0] == Rational(1));
  CHECK((*c)[3] == Rational(2));
  CHECK((*c)[4] == Rational(-1, 3));
  CHECK_FALSE(basis_coordinates(parse_generator("t;0;0;0;0"), b).has_value());
}

TEST_CASE("generator parsing") {
  CHECK(parse_generator("X1 + 2*X3") == Generator(1, 0, 2, 0, 0));
  CHECK(parse_generator("y; -x; 0; 0; 0") == standard_basis()[3]);
  CHECK_THROWS(parse_generator("X1*X2"));
  CHECK_THROWS(parse_generator("X1 + 1"));
  CHECK_THROWS(parse_generator("1;2;3"));
  CHECK_THROWS(Generator(P("u_x"), 0, 0, 0, 0));
}

TEST_CASE("PDE instance") {
  CHECK(kPde.residual == P("u_tt - a*(u_xxt + u_yyt) - b*(u_xx + u_yy) - f"));
  CHECK(kPde.solved_form == P("u_tt - a*(u_xxt + u_yyt) - b*(u_xx + u_yy)"));
  CHECK_THROWS(PDEInstance::from_residual(P("u_tt - 2*f")));
  CHECK(kPde.with_parameters(Rational(1), std::nullopt).residual == P("u_tt - u_xxt - u_yyt - b*(u_xx + u_yy) - f"));
}

TEST_CASE("prolongation") {
  auto b = standard_basis();
  for (const auto& [s, c] : prolong(b[0], 3)) CHECK(c.is_zero());
  for (const auto& [s, c] : prolong(b[4], 3)) CHECK(c == Expr(s));
  auto p4 = prolong(b[3], 1);
  CHECK(p4.at(Symbol::jet("u", {IndexVar::X})) == P("u_y"));
  CHECK(p4.at(Symbol::jet("u", {IndexVar::Y})) == P("-u_x"));
  CHECK(p4.at(Symbol::jet("u", {IndexVar::T})).is_zero());
  // phi^x = D_x(phi) - u_x D_x(xi1) - u_y D_x(xi2) - u_t D_x(xi3) for x d_x + u d_u.
  auto ps = prolong(parse_generator("x;0;0;u;0"), 1);
  CHECK(ps.at(Symbol::jet("u", {IndexVar::X})).is_zero());
  CHECK(ps.at(Symbol::jet("u", {IndexVar::Y})) == P("u_y"));
  CHECK_THROWS(prolong(b[0], 4));
}

TEST_CASE("symmetries of the model") {
  auto b = standard_basis();
  for (const auto& g : b) {
    INFO(g.label());
    SymmetryReport r = verify_symmetry(g, kPde);
    CHECK(r.is_symmetry);
    CHECK(r.canonical_zero);
  }
  CHECK(verify_symmetry(f2_family_generator(), kPde).canonical_zero);
}

TEST_CASE("non-symmetries leave a residual") {
  SymmetryReport r = verify_symmetry(parse_generator("t;0;0;0;0"), kPde);
  CHECK_FALSE(r.is_symmetry);
  CHECK(r.residual == P("a*u_xxx + a*u_xyy - 2*u_xt"));
  CHECK(r.max_numeric_residual > 1e-6);
  SymmetryReport s = verify_symmetry(parse_generator("x;0;0;0;0"), kPde);
  CHECK_FALSE(s.is_symmetry);
  CHECK(s.residual == P("2*a*u_xxt + 2*b*u_xx"));
  CHECK(verify_symmetry(parse_generator("0;0;0;1;0"), kPde).is_symmetry);
  CHECK_FALSE(verify_symmetry(parse_generator("0;0;0;t^2;0"), kPde).is_symmetry);
  CHECK(verify_symmetry(parse_generator("0;0;0;t^2;2"), kPde).is_symmetry);
}

TEST_CASE("property: bracket antisymmetry and Jacobi on random fields") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Generator v = random_field(rng), w = random_field(rng);
    CHECK(bracket(v, w) == bracket(w, v).scaled(Expr(-1)));
  }
  for (int i = 0; i < 20; ++i) {
    Generator u = random_field(rng), v = random_field(rng), w = random_field(rng);
    Generator sum = bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v));
    CHECK(sum.is_zero());
  }
}

TEST_CASE("property: invariance residual is linear in the generator") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> k(-4, 4);
  for (int i = 0; i < 10; ++i) {
    Generator v = random_field(rng), w = random_field(rng);
    Expr alpha(k(rng)), beta(Rational(k(rng), 3));
    Expr lhs = invariance_residual(v.scaled(alpha) + w.scaled(beta), kPde);
    Expr rhs = alpha * invariance_residual(v, kPde) + beta * invariance_residual(w, kPde);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("determining equations vanish on the general solution") {
  DeterminingSystem sys = determining_equations(general_ansatz(), kPde);
  CHECK(sys.raw_count >= sys.equations.size());
  CHECK(sys.equations.size() > 50);
  auto sol = general_solution();
  for (const auto& eq : sys.equations) {
    INFO(eq.equation.str());
    CHECK(instantiate_ansatz(eq.equation, sol).is_zero());
  }
  // Each basis generator is a particular solution too.
  for (const auto& g : standard_basis()) {
    for (const auto& eq : sys.equations) CHECK(instantiate_ansatz(eq.equation, g.components()).is_zero());
  }
}

TEST_CASE("determining equations of a restricted ansatz") {
  SymbolTable t = SymbolTable::standard();
  t.declare_function({"k", {"t"}});
  Generator ansatz(parse("k(t)", t), 0, 0, 0, 0);
  DeterminingSystem sys = determining_equations(ansatz, kPde);
  bool forces_kt = false;
  for (const auto& eq : sys.equations) forces_kt = forces_kt || eq.equation == parse("k_t(t)", t);
  CHECK(forces_kt);
  CHECK(determining_equations(standard_basis()[0], kPde).equations.empty());
}

TEST_CASE("a non-solution violates some determining equation") {
  DeterminingSystem sys = determining_equations(general_ansatz(), kPde);
  std::array<Expr, 5> bad{P("x"), Expr(), Expr(), Expr(), Expr()};
  bool violated = false;
  for (const auto& eq : sys.equations) violated = violated || !instantiate_ansatz(eq.equation, bad).is_zero();
  CHECK(violated);
}
