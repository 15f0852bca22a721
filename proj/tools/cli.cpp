#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "liesym/adjoint.hpp"
#include "liesym/flows.hpp"
#include "liesym/parser.hpp"
#include "liesym/reduction.hpp"
#include "liesym/symmetry.hpp"

namespace liesym::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

json num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) return static_cast<std::int64_t>(v);
  return v;
}

struct Config {
  std::string format = "json";
  std::uint64_t seed = 42;
  std::optional<Rational> a;
  std::optional<Rational> b;

  [[nodiscard]] PDEInstance pde() const { return PDEInstance::viscoelastic().with_parameters(a, b); }
};

void require_format(const Config& cfg, std::initializer_list<const char*> allowed, const std::string& cmd) {
  for (const char* f : allowed)
    if (cfg.format == f) return;
  throw UsageError("format '" + cfg.format + "' is not available for '" + cmd + "'");
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

Generator generator_from_spec(const std::string& spec) {
  auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{') {
    json j = json::parse(spec);
    static const std::array<std::string, 5> keys{"xi1", "xi2", "xi3", "phi1", "phi2"};
    for (const auto& [k, v] : j.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw UsageError("unknown generator key '" + k + "'");
    }
    std::string joined;
    for (std::size_t i = 0; i < 5; ++i) {
      if (i) joined += ";";
      if (!j.contains(keys[i])) {
        joined += "0";
      } else if (j[keys[i]].is_string()) {
        joined += j[keys[i]].get<std::string>();
      } else if (j[keys[i]].is_number()) {
        joined += j[keys[i]].dump();
      } else {
        throw UsageError("generator component '" + keys[i] + "' must be a string or number");
      }
    }
    return Generator(parse_generator(joined).components(), spec);
  }
  return parse_generator(spec);
}

json generator_json(const Generator& g) {
  json j;
  j["spec"] = g.label();
  j["field"] = g.str();
  return j;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_table(const Config& cfg, std::ostream& out) {
  require_format(cfg, {"json", "markdown"}, "table");
  auto basis = standard_basis();
  StructureConstants sc = commutator_table(basis);
  const auto& printed = printed_commutator_table();
  bool match = true;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) match = match && sc.cell(i, j) == printed[i][j];
  if (cfg.format == "markdown") {
    out << sc.markdown();
  } else {
    json j;
    j["basis"] = json::array();
    for (const auto& g : basis) j["basis"].push_back({{"label", g.label()}, {"field", g.str()}});
    j["cells"] = json::array();
    j["reference"] = json::array();
    for (std::size_t r = 0; r < 5; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < 5; ++c) row.push_back(sc.cell(r, c));
      j["cells"].push_back(row);
      j["reference"].push_back(printed[r]);
    }
    j["antisymmetric"] = sc.is_antisymmetric();
    j["jacobi"] = sc.satisfies_jacobi();
    j["match"] = match;
    emit(out, j);
  }
  return match ? kOk : kMismatch;
}

int cmd_adjoint_table(const Config& cfg, std::ostream& out) {
  require_format(cfg, {"json", "markdown"}, "adjoint-table");
  auto basis = standard_basis();
  auto cells = audit_adjoint_table(commutator_table(basis));
  std::size_t mismatches = 0;
  for (const auto& c : cells) mismatches += c.match ? 0 : 1;
  if (cfg.format == "markdown") {
    out << "| Ad | X1 | X2 | X3 | X4 | X5 |\n|---|---|---|---|---|---|\n";
    for (std::size_t t = 0; t < 5; ++t) {
      out << "| X" << t + 1 << " |";
      for (std::size_t r = 0; r < 5; ++r) {
        const auto& c = cells[t * 5 + r];
        out << " " << md_escape(c.expected_from_series);
        if (!c.match) out << " [printed: " << md_escape(c.published) << "]";
        out << " |";
      }
      out << "\n";
    }
  } else {
    json j;
    j["parameter"] = "s";
    j["cells"] = json::array();
    for (const auto& c : cells) {
      j["cells"].push_back({{"t", c.t},
                            {"r", c.r},
                            {"expected_from_series", c.expected_from_series},
                            {"published", c.published},
                            {"match", c.match}});
    }
    j["mismatches"] = mismatches;
    emit(out, j);
  }
  return mismatches == 0 ? kOk : kMismatch;
}

int cmd_adjoint_matrix(const Config& cfg, std::ostream& out, std::size_t t) {
  require_format(cfg, {"json", "markdown"}, "adjoint-matrix");
  auto basis = standard_basis();
  AdjointMatrix m = adjoint_matrix(commutator_table(basis), t);
  auto audit = audit_adjoint_matrix(m);
  bool match = std::all_of(audit.begin(), audit.end(), [](const auto& e) { return e.match; });
  if (cfg.format == "markdown") {
    out << "| M" << t << " | 1 | 2 | 3 | 4 | 5 |\n|---|---|---|---|---|---|\n";
    for (std::size_t r = 0; r < 5; ++r) {
      out << "| " << r + 1 << " |";
      for (std::size_t c = 0; c < 5; ++c) out << " " << md_escape(m.m(r, c).str()) << " |";
      out << "\n";
    }
  } else {
    json j;
    j["t"] = t;
    j["parameter"] = "s";
    j["convention"] = "column r holds the coordinates of Ad(exp(s X_t)) X_r; new coefficients = M * old";
    j["matrix"] = json::array();
    j["printed_transposed"] = json::array();
    for (std::size_t r = 0; r < 5; ++r) {
      json row = json::array();
      json prow = json::array();
      for (std::size_t c = 0; c < 5; ++c) {
        row.push_back(m.m(r, c).str());
        const auto& e = audit[c * 5 + r];
        prow.push_back(e.printed);
      }
      j["matrix"].push_back(row);
      j["printed_transposed"].push_back(prow);
    }
    j["mismatches"] = json::array();
    for (const auto& e : audit) {
      if (!e.match) j["mismatches"].push_back({{"row", e.row}, {"col", e.col}, {"derived", e.derived}, {"printed", e.printed}});
    }
    j["match"] = match;
    emit(out, j);
  }
  return match ? kOk : kMismatch;
}

int cmd_verify(const Config& cfg, std::ostream& out, const std::string& spec) {
  require_format(cfg, {"json", "markdown"}, "verify");
  Generator g = generator_from_spec(spec);
  SymmetryReport rep = verify_symmetry(g, cfg.pde(), cfg.seed);
  if (cfg.format == "markdown") {
    out << "| generator | symmetry | canonical zero | residual | max numeric residual |\n|---|---|---|---|---|\n";
    out << "| " << md_escape(g.str()) << " | " << (rep.is_symmetry ? "yes" : "no") << " | "
        << (rep.canonical_zero ? "yes" : "no") << " | " << md_escape(rep.residual.str()) << " | "
        << rep.max_numeric_residual << " |\n";
  } else {
    json j;
    j["generator"] = generator_json(g);
    j["is_symmetry"] = rep.is_symmetry;
    j["canonical_zero"] = rep.canonical_zero;
    j["residual"] = rep.residual.str();
    j["max_numeric_residual"] = num(rep.max_numeric_residual);
    j["numeric_points"] = rep.numeric_points;
    j["seed"] = cfg.seed;
    emit(out, j);
  }
  return rep.is_symmetry ? kOk : kMismatch;
}

int cmd_determining(const Config& cfg, std::ostream& out) {
  require_format(cfg, {"json", "markdown"}, "determining");
  PDEInstance pde = cfg.pde();
  DeterminingSystem sys = determining_equations(general_ansatz(), pde);
  std::array<Expr, 5> sol = general_solution();
  Bindings params;
  if (cfg.a) params.emplace(Symbol::parameter("a"), Expr(*cfg.a));
  if (cfg.b) params.emplace(Symbol::parameter("b"), Expr(*cfg.b));
  for (auto& s : sol) s = substitute(s, params);
  bool all = true;
  std::vector<bool> vanish;
  for (const auto& eq : sys.equations) {
    Expr z = instantiate_ansatz(eq.equation, sol);
    bool ok = z.is_zero();
    vanish.push_back(ok);
    all = all && ok;
  }
  if (cfg.format == "markdown") {
    out << "raw equations: " << sys.raw_count << " (published count: 227), distinct: " << sys.equations.size()
        << "\n\n| # | jet monomial | equation | vanishes |\n|---|---|---|---|\n";
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
      out << "| " << i + 1 << " | " << md_escape(monomial_expr(sys.equations[i].jet_monomial).str()) << " | "
          << md_escape(sys.equations[i].equation.str()) << " | " << (vanish[i] ? "yes" : "no") << " |\n";
    }
  } else {
    json j;
    j["raw_count"] = sys.raw_count;
    j["stated_count"] = 227;
    j["equation_count"] = sys.equations.size();
    j["all_vanish_at_general_solution"] = all;
    j["equations"] = json::array();
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
      j["equations"].push_back({{"jet_monomial", monomial_expr(sys.equations[i].jet_monomial).str()},
                                {"equation", sys.equations[i].equation.str()},
                                {"vanishes", static_cast<bool>(vanish[i])}});
    }
    emit(out, j);
  }
  return all ? kOk : kMismatch;
}

CoeffVector parse_coeffs(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (tok.empty() || used != tok.size()) throw UsageError("bad coefficient '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.size() != 5) throw UsageError("--coeffs expects 5 comma-separated numbers");
  return {vals[0], vals[1], vals[2], vals[3], vals[4]};
}

int cmd_optimal(const Config& cfg, std::ostream& out, const std::string& coeffs) {
  require_format(cfg, {"json", "markdown"}, "optimal");
  CoeffVector v = parse_coeffs(coeffs);
  Normalization n = normalize(v);
  if (cfg.format == "markdown") {
    out << "| class | c1 | c2 | word | scale |\n|---|---|---|---|---|\n| " << n.cls.label() << " | " << n.cls.c1
        << " | " << n.cls.c2 << " | ";
    for (std::size_t i = 0; i < n.word.size(); ++i)
      out << (i ? ", " : "") << "Ad(exp(" << n.word[i].s << " X" << n.word[i].t << "))";
    out << " | " << n.scale << " |\n";
  } else {
    json j;
    j["class"] = n.cls.class_id;
    j["c1"] = num(n.cls.c1);
    j["c2"] = num(n.cls.c2);
    j["word"] = json::array();
    for (const auto& s : n.word) j["word"].push_back({{"t", s.t}, {"s", num(s.s)}});
    j["label"] = n.cls.label();
    j["scale"] = num(n.scale);
    j["representative"] = json::array();
    for (double r : n.cls.representative) j["representative"].push_back(num(r));
    j["input"] = json::array();
    for (double a : v) j["input"].push_back(num(a));
    emit(out, j);
  }
  return kOk;
}

int cmd_reduce(const Config& cfg, std::ostream& out, const std::string& spec) {
  require_format(cfg, {"json", "markdown"}, "reduce");
  Generator g = generator_from_spec(spec);
  PDEInstance pde = cfg.pde();
  SimilarityChart chart = characteristic_invariants(g);
  ReducedPDE red = reduce_pde(pde, chart);
  ReductionCheck check = verify_reduction(pde, chart, red, cfg.seed);
  std::optional<std::size_t> row = reduction_table_row(g);
  std::vector<std::string> diffs;
  if (row) {
    Bindings params;
    if (cfg.a) params.emplace(Symbol::parameter("a"), Expr(*cfg.a));
    if (cfg.b) params.emplace(Symbol::parameter("b"), Expr(*cfg.b));
    Expr printed = substitute(parse(printed_reduction_table()[*row - 1]), params);
    diffs = diff_terms(printed, red.residual);
  }
  bool ok = check.passed && diffs.empty();
  if (cfg.format == "markdown") {
    out << "| generator | xi | eta | reduced residual |\n|---|---|---|---|\n| " << md_escape(g.str()) << " | "
        << md_escape(chart.xi.str()) << " | " << md_escape(chart.eta.str()) << " | " << md_escape(red.residual.str())
        << " |\n";
    if (row) {
      out << "\npublished row " << *row << ": " << printed_reduction_table()[*row - 1] << "\n";
      for (const auto& d : diffs) out << "- published minus derived: " << d << "\n";
    }
    out << "\nverification: max discrepancy " << check.max_discrepancy << " (seed " << check.seed << ")\n";
  } else {
    json j;
    j["generator"] = generator_json(g);
    j["xi"] = chart.xi.str();
    j["eta"] = chart.eta.str();
    j["reduced_residual"] = red.residual.str();
    j["published_row"] = row ? json(*row) : json(nullptr);
    j["printed_row"] = row ? json(printed_reduction_table()[*row - 1]) : json(nullptr);
    j["diff_terms"] = diffs;
    j["verify"] = {{"passed", check.passed}, {"max_discrepancy", num(check.max_discrepancy)}, {"seed", check.seed}};
    emit(out, j);
  }
  return ok ? kOk : kMismatch;
}

int cmd_verify_reduction(const Config& cfg, std::ostream& out, const std::string& spec) {
  require_format(cfg, {"json", "markdown"}, "verify-reduction");
  Generator g = generator_from_spec(spec);
  PDEInstance pde = cfg.pde();
  SimilarityChart chart = characteristic_invariants(g);
  ReducedPDE red = reduce_pde(pde, chart);
  ReductionCheck check = verify_reduction(pde, chart, red, cfg.seed);
  if (cfg.format == "markdown") {
    out << "| generator | passed | max discrepancy | functions | points | seed |\n|---|---|---|---|---|---|\n| "
        << md_escape(g.str()) << " | " << (check.passed ? "yes" : "no") << " | " << check.max_discrepancy << " | "
        << check.functions << " | " << check.points << " | " << check.seed << " |\n";
  } else {
    json j;
    j["generator"] = generator_json(g);
    j["xi"] = chart.xi.str();
    j["eta"] = chart.eta.str();
    j["reduced_residual"] = red.residual.str();
    j["passed"] = check.passed;
    j["max_discrepancy"] = num(check.max_discrepancy);
    j["threshold"] = 1e-7;
    j["functions"] = check.functions;
    j["points"] = check.points;
    j["seed"] = check.seed;
    emit(out, j);
  }
  return check.passed ? kOk : kMismatch;
}

struct EpsRange {
  double lo = 0;
  double hi = 0;
  std::size_t n = 0;
};

EpsRange parse_eps(const std::string& text) {
  auto c1 = text.find(':');
  auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw UsageError("--eps expects LO:HI:N");
  try {
    std::size_t used = 0;
    EpsRange r;
    std::string lo = text.substr(0, c1), hi = text.substr(c1 + 1, c2 - c1 - 1), n = text.substr(c2 + 1);
    r.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    r.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    long long k = std::stoll(n, &used);
    if (used != n.size() || k < 0) throw std::invalid_argument(n);
    r.n = static_cast<std::size_t>(k);
    return r;
  } catch (const std::exception&) {
    throw UsageError("--eps expects LO:HI:N, got '" + text + "'");
  }
}

int cmd_flow(const Config& cfg, std::ostream& out, const std::string& spec, const std::string& seeds_path,
             const std::string& eps_text, bool project_xy) {
  require_format(cfg, {"json", "markdown", "csv"}, "flow");
  Generator g = generator_from_spec(spec);
  EpsRange eps = parse_eps(eps_text);
  std::vector<Point3> seeds;
  if (seeds_path == "-") {
    seeds = read_seeds(std::cin);
  } else {
    std::ifstream in(seeds_path);
    if (!in) throw UsageError("cannot open seeds file '" + seeds_path + "'");
    seeds = read_seeds(in);
  }
  FlowMap fm = flow_map(g);
  auto samples = sample_flow(fm, seeds, eps.lo, eps.hi, eps.n, project_xy);
  if (cfg.format == "csv") {
    out << flow_csv(samples);
  } else if (cfg.format == "markdown") {
    out << "| seed_id | eps | x | y | t |\n|---|---|---|---|---|\n";
    for (const auto& s : samples)
      out << "| " << s.seed_id << " | " << s.eps << " | " << s.p[0] << " | " << s.p[1] << " | " << s.p[2] << " |\n";
  } else {
    json j;
    j["generator"] = generator_json(g);
    j["image"] = {{"x", fm.image[0].str()}, {"y", fm.image[1].str()}, {"t", fm.image[2].str()}};
    j["project_xy"] = project_xy;
    j["samples"] = json::array();
    for (const auto& s : samples)
      j["samples"].push_back({{"seed_id", s.seed_id}, {"eps", num(s.eps)}, {"x", num(s.p[0])}, {"y", num(s.p[1])},
                              {"t", num(s.p[2])}});
    emit(out, j);
  }
  return kOk;
}

std::optional<Rational> parse_param(const std::string& text, const char* name) {
  if (text.empty()) return std::nullopt;
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw UsageError(std::string("--") + name + " expects a rational number, got '" + text + "'");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lie point symmetries of the 2D viscoelastic equation u_tt - a(u_xxt + u_yyt) - b(u_xx + u_yy) = f",
               "liesym"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format, seed_text, a_text, b_text;
  app.add_option("--format", format, "json | markdown | csv (env LIESYM_FORMAT)");
  app.add_option("--seed", seed_text, "random seed for numeric checks (env LIESYM_SEED, default 42)");
  app.add_option("--a", a_text, "numeric value for the parameter a");
  app.add_option("--b", b_text, "numeric value for the parameter b");

  std::size_t t_index = 0;
  std::string generator, coeffs, seeds, eps;
  bool project_xy = false;

  auto* table = app.add_subcommand("table", "commutator table of X1..X5");
  auto* adj_table = app.add_subcommand("adjoint-table", "adjoint table audit");
  auto* adj_matrix = app.add_subcommand("adjoint-matrix", "matrix of Ad(exp(s X_t))");
  adj_matrix->add_option("--t", t_index, "generator index 1..5")->required()->check(CLI::Range(1, 5));
  auto* verify = app.add_subcommand("verify", "check that a generator is a point symmetry");
  verify->add_option("--generator", generator, "basis combination, five ';'-separated components or JSON")->required();
  auto* determining = app.add_subcommand("determining", "determining equations of the general point generator");
  auto* optimal = app.add_subcommand("optimal", "normalize a1 X1 + ... + a5 X5 to its optimal-system class");
  optimal->add_option("--coeffs", coeffs, "a1,a2,a3,a4,a5")->required();
  auto* reduce = app.add_subcommand("reduce", "similarity variables and reduced equation");
  reduce->add_option("--generator", generator)->required();
  auto* verify_red = app.add_subcommand("verify-reduction", "numeric check of a reduction");
  verify_red->add_option("--generator", generator)->required();
  auto* flow = app.add_subcommand("flow", "sampled trajectories of a generator's flow");
  flow->add_option("--generator", generator)->required();
  flow->add_option("--seeds", seeds, "file with one x,y,t seed per line ('-' for stdin)")->required();
  flow->add_option("--eps", eps, "LO:HI:N")->required();
  flow->add_flag("--project-xy", project_xy, "set t = 0 in the output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (!args.empty() && !args[0].empty() && args[0][0] != '-' && app.get_subcommand_no_throw(args[0]) == nullptr) {
      err << "usage error: unknown subcommand '" << args[0] << "'\n";
    } else {
      err << "usage error: " << e.what() << "\n";
    }
    err << "run with --help for usage\n";
    return kUsage;
  }

  try {
    Config cfg;
    if (const char* env = std::getenv("LIESYM_FORMAT"); env && *env) cfg.format = env;
    if (!format.empty()) cfg.format = format;
    if (cfg.format != "json" && cfg.format != "markdown" && cfg.format != "csv")
      throw UsageError("unknown format '" + cfg.format + "' (json, markdown, csv)");
    std::string seed_src = seed_text;
    if (seed_src.empty())
      if (const char* env = std::getenv("LIESYM_SEED"); env && *env) seed_src = env;
    if (!seed_src.empty()) {
      std::size_t used = 0;
      try {
        cfg.seed = std::stoull(seed_src, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != seed_src.size() || seed_src[0] == '-') throw UsageError("bad seed '" + seed_src + "'");
    }
    cfg.a = parse_param(a_text, "a");
    cfg.b = parse_param(b_text, "b");

    if (*table) return cmd_table(cfg, out);
    if (*adj_table) return cmd_adjoint_table(cfg, out);
    if (*adj_matrix) return cmd_adjoint_matrix(cfg, out, t_index);
    if (*verify) return cmd_verify(cfg, out, generator);
    if (*determining) return cmd_determining(cfg, out);
    if (*optimal) return cmd_optimal(cfg, out, coeffs);
    if (*reduce) return cmd_reduce(cfg, out, generator);
    if (*verify_red) return cmd_verify_reduction(cfg, out, generator);
    if (*flow) return cmd_flow(cfg, out, generator, seeds, eps, project_xy);
    throw UsageError("no subcommand");
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "invalid JSON: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace liesym::cli
