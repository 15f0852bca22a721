#pragma once

#include <array>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/linalg.hpp"
#include "liesym/symmetry.hpp"

namespace liesym {

/// Coordinates (a1, ..., a5) of a1 X1 + ... + a5 X5.
using CoeffVector = std::array<double, 5>;

/// Matrix of X -> Ad(exp(s X_t)) X on coefficient vectors: column r holds the
/// coordinates of Ad(exp(s X_t)) X_r, so new = M * old.
struct AdjointMatrix {
  std::size_t t = 0;  // 1-based generator index
  ExprMatrix m;       // entries in the parameter s

  [[nodiscard]] Matrix<double> at(double s) const;
  [[nodiscard]] ExprMatrix at(const Expr& s) const;
};

/// Parameter symbol used in adjoint matrices.
Symbol adjoint_parameter();

/// Ad(exp(s X_t)) X_r = X_r - s [X_t, X_r] + s^2/2 [X_t, [X_t, X_r]] - ...
/// summed in closed form. `t` is 1-based. Throws SeriesError if the series
/// neither terminates nor resums to a rotation.
AdjointMatrix adjoint_matrix(const StructureConstants& sc, std::size_t t);

/// Coordinates of Ad(exp(s X_t)) X_r for all t, r (both 0-based here).
using AdjointTable = std::array<std::array<std::array<Expr, 5>, 5>, 5>;
AdjointTable adjoint_table(const StructureConstants& sc);

/// "cos(s)*X1 - sin(s)*X2" rendering of a coordinate vector.
std::string combination_str(const std::array<Expr, 5>& coords);

/// Reference adjoint table: cell [t][r] is the published image of X_r under
/// Ad(exp(s X_t)). The published matrices use the same rows (row r = image of X_r).
const std::array<std::array<std::string, 5>, 5>& printed_adjoint_table();

/// Parses "X2 - s*X4" into basis coordinates.
std::array<Expr, 5> parse_combination(std::string_view text);

struct AdjointAuditCell {
  std::size_t t = 0;  // 1-based
  std::size_t r = 0;  // 1-based
  std::string expected_from_series;
  std::string published;
  bool match = false;
};

std::vector<AdjointAuditCell> audit_adjoint_table(const StructureConstants& sc);

struct MatrixAuditEntry {
  std::size_t row = 0;  // 1-based, in our column-image convention
  std::size_t col = 0;
  std::string derived;
  std::string printed;
  bool match = false;
};

/// Compares the derived M_t against the transpose of the published matrix.
std::vector<MatrixAuditEntry> audit_adjoint_matrix(const AdjointMatrix& m);

struct AdjointStep {
  std::size_t t = 0;  // 1-based
  double s = 0.0;
};

/// Adjoint action of the standard five-dimensional algebra, with matrices
/// built once.
class AdjointRepresentation {
public:
  explicit AdjointRepresentation(const StructureConstants& sc);
  static const AdjointRepresentation& standard();

  [[nodiscard]] const AdjointMatrix& matrix(std::size_t t) const { return matrices_.at(t - 1); }
  [[nodiscard]] const StructureConstants& constants() const { return sc_; }

  /// Applies the steps in order: the first step acts first.
  [[nodiscard]] CoeffVector apply(const std::vector<AdjointStep>& word, const CoeffVector& v) const;

private:
  StructureConstants sc_;
  std::vector<AdjointMatrix> matrices_;
};

CoeffVector apply_adjoint(const std::vector<AdjointStep>& word, const CoeffVector& v);

/// One-dimensional subalgebra classes:
///   1: X1 + c1 X3 + c2 X5      2: X2 + c1 X3 + c2 X5
///   3: X4 + c1 X3 + c2 X5      4: X3 + c1 X5      4b: X5
struct OptimalClass {
  int class_id = 0;
  bool variant_b = false;
  double c1 = 0.0;
  double c2 = 0.0;
  CoeffVector representative{};

  [[nodiscard]] std::string label() const;
};

struct Normalization {
  OptimalClass cls;
  std::vector<AdjointStep> word;
  double scale = 1.0;  // representative = scale * apply_adjoint(word, v)
};

class ZeroVectorError : public std::invalid_argument {
public:
  ZeroVectorError() : std::invalid_argument("zero vector does not span a subalgebra") {}
};

Normalization normalize(const CoeffVector& v);

/// Same adjoint orbit of one-dimensional subalgebras. Classes 1 and 2 are
/// merged (the rotation Ad(exp(-pi/2 X4)) maps X1 to X2) and their constants
/// compared up to the overall sign freedom.
bool equivalent(const CoeffVector& v, const CoeffVector& w, double tol = 1e-9);

}  // namespace liesym
