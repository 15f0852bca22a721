#include "liesym/flows.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "liesym/linalg.hpp"

namespace liesym {

namespace {

const Symbol& coord(std::size_t i) { return base_coordinates()[i]; }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Symbol flow_parameter() { return Symbol::parameter("eps"); }

Point3 FlowMap::at(const Point3& p, double eps) const {
  Assignment a;
  a.values = {{"x", p[0]}, {"y", p[1]}, {"t", p[2]}, {flow_parameter().name(), eps}};
  return {eval_numeric(image[0], a), eval_numeric(image[1], a), eval_numeric(image[2], a)};
}

FlowMap flow_map(const Generator& v) {
  RationalMatrix a(3, 3);
  std::array<Expr, 3> b;
  for (std::size_t i = 0; i < 3; ++i) {
    const Expr& c = v.components()[i];
    Expr rest = c;
    for (std::size_t j = 0; j < 3; ++j) {
      Expr d = partial(c, coord(j));
      auto r = d.is_zero() ? std::optional<Rational>(Rational(0)) : d.constant_value();
      if (!r) throw NonAffineGeneratorError("coefficient " + c.str() + " is not affine in (x, y, t)");
      a(i, j) = *r;
      rest -= Expr(*r) * Expr(coord(j));
    }
    auto r0 = rest.is_zero() ? std::optional<Rational>(Rational(0)) : rest.constant_value();
    if (!r0) throw NonAffineGeneratorError("coefficient " + c.str() + " is not affine with rational coefficients");
    b[i] = Expr(*r0);
  }
  const Expr eps(flow_parameter());
  ExprMatrix e = exp_closed_form(a, eps);
  ExprMatrix ie = integral_exp_closed_form(a, eps);
  FlowMap fm{v, {}};
  for (std::size_t i = 0; i < 3; ++i) {
    Expr img;
    for (std::size_t j = 0; j < 3; ++j) img += e(i, j) * Expr(coord(j)) + ie(i, j) * b[j];
    fm.image[i] = img;
  }
  return fm;
}

std::array<Expr, 3> group_law_defect(const FlowMap& fm) {
  const Symbol delta = Symbol::parameter("delta");
  const Expr eps(flow_parameter());
  Bindings inner;
  for (std::size_t i = 0; i < 3; ++i) inner[coord(i)] = substitute(fm.image[i], {{flow_parameter(), Expr(delta)}});
  std::array<Expr, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    Expr composed = substitute_simultaneous(fm.image[i], inner);
    Expr direct = substitute_simultaneous(fm.image[i], {{flow_parameter(), eps + Expr(delta)}});
    out[i] = composed - direct;
  }
  return out;
}

std::vector<FlowSample> sample_flow(const FlowMap& fm, const std::vector<Point3>& seeds, double lo, double hi,
                                    std::size_t n, bool project_xy) {
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (n < 2) throw std::invalid_argument("need at least two samples per seed");
  if (!(lo < hi)) throw std::invalid_argument("eps range requires lo < hi");
  std::vector<FlowSample> out;
  out.reserve(seeds.size() * n);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (std::size_t k = 0; k < n; ++k) {
      double eps = k + 1 == n ? hi : lo + static_cast<double>(k) * (hi - lo) / static_cast<double>(n - 1);
      Point3 p = fm.at(seeds[s], eps);
      if (project_xy) p[2] = 0.0;
      out.push_back({s, eps, p});
    }
  }
  return out;
}

std::vector<Point3> read_seeds(std::istream& in) {
  std::vector<Point3> seeds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw std::invalid_argument("seeds line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      vals.push_back(v);
    }
    if (vals.empty()) continue;
    if (vals.size() != 3)
      throw std::invalid_argument("seeds line " + std::to_string(lineno) + ": expected 3 values, got " +
                                  std::to_string(vals.size()));
    seeds.push_back({vals[0], vals[1], vals[2]});
  }
  return seeds;
}

std::string flow_csv(const std::vector<FlowSample>& samples) {
  std::string out = "seed_id,eps,x,y,t\n";
  for (const auto& s : samples) {
    out += std::to_string(s.seed_id) + "," + format_double(s.eps) + "," + format_double(s.p[0]) + "," +
           format_double(s.p[1]) + "," + format_double(s.p[2]) + "\n";
  }
  return out;
}

}  // namespace liesym
