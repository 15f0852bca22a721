#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "liesym/flows.hpp"
#include "liesym/linalg.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

}  // namespace

TEST_CASE("closed-form flows") {
  FlowMap r = flow_map(parse_generator("X4"));
  CHECK(r.image[0] == P("x*cos(eps) + y*sin(eps)"));
  CHECK(r.image[1] == P("-x*sin(eps) + y*cos(eps)"));
  CHECK(r.image[2] == P("t"));

  FlowMap tr = flow_map(parse_generator("X1 - 2*X2"));
  CHECK(tr.image[0] == P("x + eps"));
  CHECK(tr.image[1] == P("y - 2*eps"));
  CHECK(tr.image[2] == P("t"));

  FlowMap h = flow_map(parse_generator("X4 + 3*X3"));
  CHECK(h.image[2] == P("t + 3*eps"));

  CHECK_THROWS_AS(flow_map(parse_generator("x; 0; 1; 0; 0")), SeriesError);
}

TEST_CASE("non-affine generators are rejected") {
  CHECK_THROWS_AS(flow_map(parse_generator("x^2; 0; 0; 0; 0")), NonAffineGeneratorError);
  CHECK_THROWS_AS(flow_map(parse_generator("sin(t); 0; 0; 0; 0")), NonAffineGeneratorError);
  CHECK_THROWS_AS(flow_map(parse_generator("a*x; 0; 0; 0; 0")), NonAffineGeneratorError);
}

TEST_CASE("the group law holds symbolically") {
  for (const char* g : {"X4", "X1 + X3", "X4 + 2*X3 - X1", "y; 0; 1; 0; 0"}) {
    INFO(g);
    for (const Expr& d : group_law_defect(flow_map(parse_generator(g)))) CHECK(d.is_zero());
  }
}

TEST_CASE("property: group law and generator recovery numerically") {
  FlowMap fm = flow_map(parse_generator("X4 + X3 - 2*X1"));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int i = 0; i < 100; ++i) {
    Point3 p{d(rng), d(rng), d(rng)};
    double e1 = d(rng), e2 = d(rng);
    Point3 lhs = fm.at(fm.at(p, e1), e2);
    Point3 rhs = fm.at(p, e1 + e2);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-10);

    const double h = 1e-6;
    Point3 fwd = fm.at(p, h), bwd = fm.at(p, -h);
    // V = (y - 2, -x, 1) on (x, y, t).
    Point3 field{p[1] - 2, -p[0], 1};
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs((fwd[k] - bwd[k]) / (2 * h) - field[k]) < 1e-6);
  }
}

TEST_CASE("rotations preserve the radius") {
  FlowMap fm = flow_map(parse_generator("X4"));
  Expr r2 = fm.image[0] * fm.image[0] + fm.image[1] * fm.image[1];
  CHECK(r2 == P("x^2 + y^2"));
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int i = 0; i < 100; ++i) {
    Point3 p{d(rng), d(rng), d(rng)};
    Point3 q = fm.at(p, d(rng));
    CHECK(std::abs(q[0] * q[0] + q[1] * q[1] - p[0] * p[0] - p[1] * p[1]) < 1e-12 * (1 + p[0] * p[0] + p[1] * p[1]));
  }
}

TEST_CASE("sampling") {
  FlowMap fm = flow_map(parse_generator("X4"));
  auto s = sample_flow(fm, {{1, 0, 0}, {0, 2, 1}}, 0, std::numbers::pi, 3);
  REQUIRE(s.size() == 6);
  CHECK(s[0].eps == 0.0);
  CHECK(s[2].eps == std::numbers::pi);
  CHECK(s[1].p[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s[1].p[1] == doctest::Approx(-1.0));
  CHECK(s[3].seed_id == 1);
  CHECK(s[3].p[2] == 1.0);
  auto proj = sample_flow(fm, {{0, 2, 1}}, 0, 1, 2, true);
  CHECK(proj[1].p[2] == 0.0);
  CHECK_THROWS(sample_flow(fm, {}, 0, 1, 5));
  CHECK_THROWS(sample_flow(fm, {{0, 0, 0}}, 0, 1, 1));
  CHECK_THROWS(sample_flow(fm, {{0, 0, 0}}, 1, 1, 5));
}

TEST_CASE("seed files") {
  std::istringstream in("# seeds\n1, 2, 3\n\n4 5 6  # trailing\n-1,0.5,2e-1\n");
  auto seeds = read_seeds(in);
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[1] == Point3{4, 5, 6});
  CHECK(seeds[2][2] == doctest::Approx(0.2));
  std::istringstream bad("1 2\n");
  CHECK_THROWS(read_seeds(bad));
  std::istringstream junk("1 2 x\n");
  CHECK_THROWS(read_seeds(junk));
}

TEST_CASE("csv output") {
  std::string csv = flow_csv({{0, 0.5, {1, 2, 3}}});
  CHECK(csv.rfind("seed_id,eps,x,y,t\n", 0) == 0);
  CHECK(csv.find("0,0.5,1,2,3") != std::string::npos);
}
