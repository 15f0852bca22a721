#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json j() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = liesym::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string seeds_file() {
  std::string path = std::string(LIESYM_TEST_DIR) + "/cli_seeds.txt";
  std::ofstream(path) << "1,0,0\n0 2 1\n";
  return path;
}

}  // namespace

TEST_CASE("commutator table") {
  Result r = run({"table"});
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(j["cells"][0][3] == "-X2");
  CHECK(j["cells"][3][0] == "X2");
  CHECK(j["match"] == true);
  CHECK(j["antisymmetric"] == true);
  CHECK(j["jacobi"] == true);
  Result md = run({"--format", "markdown", "table"});
  CHECK(md.code == 0);
  CHECK(md.out.find("| X4 |") != std::string::npos);
}

TEST_CASE("adjoint audit exits with a mismatch") {
  Result r = run({"adjoint-table"});
  CHECK(r.code == 1);
  CHECK(r.j()["mismatches"] == 4);
  Result m = run({"adjoint-matrix", "--t", "4"});
  CHECK(m.code == 0);
  CHECK(m.j()["matrix"][0][0] == "cos(s)");
  CHECK(run({"adjoint-matrix", "--t", "1"}).code == 1);
  CHECK(run({"adjoint-matrix", "--t", "9"}).code == 2);
}

TEST_CASE("verify") {
  Result ok = run({"verify", "--generator", "X4"});
  CHECK(ok.code == 0);
  CHECK(ok.j()["is_symmetry"] == true);
  Result json_spec = run({"verify", "--generator", R"({"xi1":"y","xi2":"-x"})"});
  CHECK(json_spec.code == 0);
  Result bad = run({"verify", "--generator", "t;0;0;0;0"});
  CHECK(bad.code == 1);
  CHECK(bad.j()["residual"] == "a*u_xxx + a*u_xyy - 2*u_xt");
  CHECK(run({"verify", "--generator", "X1 +"}).code == 2);
  CHECK(run({"verify", "--generator", R"({"zeta":"1"})"}).code == 2);
}

TEST_CASE("optimal") {
  Result r = run({"optimal", "--coeffs", "0,0,2,1,3"});
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(j["class"] == 3);
  CHECK(j["c1"] == 2);
  CHECK(j["c2"] == 3);
  CHECK(j["word"].empty());
  CHECK(run({"optimal", "--coeffs", "0,0,0,0,0"}).code == 2);
  CHECK(run({"optimal", "--coeffs", "1,2"}).code == 2);
  CHECK(run({"optimal", "--coeffs", "0,0,0,0,2"}).j()["label"] == "4b");
}

TEST_CASE("reduce and verify-reduction") {
  Result r = run({"reduce", "--generator", "X4"});
  CHECK(r.code == 0);
  CHECK(r.j()["xi"] == "x^2 + y^2");
  CHECK(r.j()["published_row"].is_null());
  Result t = run({"reduce", "--generator", "X1 + X3"});
  CHECK(t.code == 1);
  CHECK(t.j()["published_row"] == 4);
  CHECK_FALSE(t.j()["diff_terms"].empty());
  Result v = run({"verify-reduction", "--generator", "X4 + 2*X3"});
  CHECK(v.code == 0);
  CHECK(v.j()["passed"] == true);
  CHECK(run({"reduce", "--generator", "X5"}).code == 2);
  Result fixed = run({"--a", "1/2", "--b", "3", "verify-reduction", "--generator", "X4"});
  CHECK(fixed.code == 0);
}

TEST_CASE("flow") {
  std::string seeds = seeds_file();
  Result r = run({"flow", "--generator", "X4", "--seeds", seeds, "--eps", "0:1:3"});
  REQUIRE(r.code == 0);
  CHECK(r.j()["samples"].size() == 6);
  Result csv = run({"--format", "csv", "flow", "--generator", "X4", "--seeds", seeds, "--eps", "0:1:3"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("seed_id,eps,x,y,t", 0) == 0);
  CHECK(run({"flow", "--generator", "X4", "--seeds", seeds, "--eps", "1:0:3"}).code == 2);
  CHECK(run({"flow", "--generator", "X4", "--seeds", "/nonexistent", "--eps", "0:1:3"}).code == 2);
  CHECK(run({"flow", "--generator", "x^2;0;0;0;0", "--seeds", seeds, "--eps", "0:1:3"}).code == 2);
}

TEST_CASE("usage errors") {
  Result r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"--format", "xml", "table"}).code == 2);
  CHECK(run({"--format", "csv", "table"}).code == 2);
  CHECK(run({"--seed", "abc", "table"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("environment defaults and determinism") {
  setenv("LIESYM_FORMAT", "markdown", 1);
  Result md = run({"table"});
  CHECK(md.out.rfind("|", 0) == 0);
  unsetenv("LIESYM_FORMAT");
  setenv("LIESYM_SEED", "7", 1);
  CHECK(run({"verify", "--generator", "X1"}).j()["seed"] == 7);
  unsetenv("LIESYM_SEED");
  CHECK(run({"verify", "--generator", "X1"}).j()["seed"] == 42);
  for (const char* cmd : {"table", "adjoint-table", "determining"}) {
    CHECK(run({cmd}).out == run({cmd}).out);
  }
  CHECK(run({"verify-reduction", "--generator", "X4"}).out == run({"verify-reduction", "--generator", "X4"}).out);
}
