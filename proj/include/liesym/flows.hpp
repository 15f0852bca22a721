#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/symmetry.hpp"

namespace liesym {

class NonAffineGeneratorError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

using Point3 = std::array<double, 3>;

/// Closed-form flow of the (x, y, t) part of a generator.
struct FlowMap {
  Generator generator;
  std::array<Expr, 3> image;  // x(eps), y(eps), t(eps) in terms of x, y, t, eps

  [[nodiscard]] Point3 at(const Point3& p, double eps) const;
};

Symbol flow_parameter();

/// Exact exponential of p' = A p + b, where the generator's x, y, t
/// coefficients are A (x, y, t) + b with rational entries.
FlowMap flow_map(const Generator& v);

/// image(image(p, delta), eps) - image(p, eps + delta), componentwise.
std::array<Expr, 3> group_law_defect(const FlowMap& fm);

struct FlowSample {
  std::size_t seed_id = 0;
  double eps = 0.0;
  Point3 p{};
};

/// n points per seed with eps = lo + k (hi - lo) / (n - 1). With
/// `project_xy` the t coordinate is set to 0.
std::vector<FlowSample> sample_flow(const FlowMap& fm, const std::vector<Point3>& seeds, double lo, double hi,
                                    std::size_t n, bool project_xy = false);

/// One seed per line: three numbers separated by commas or whitespace;
/// '#' starts a comment.
std::vector<Point3> read_seeds(std::istream& in);

/// Header "seed_id,eps,x,y,t" followed by one row per sample.
std::string flow_csv(const std::vector<FlowSample>& samples);

}  // namespace liesym
