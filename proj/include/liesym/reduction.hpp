#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/symmetry.hpp"

namespace liesym {

class UnsupportedGeneratorError : public std::invalid_argument {
public:
  explicit UnsupportedGeneratorError(const std::string& what);
  static const char* catalog();
};

class ReductionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Similarity variables (xi, eta) of a generator with u = h(xi, eta),
/// f = g(xi, eta). `section` maps x, y, t to a point with the given
/// (xi, eta), used to express invariant coefficients in the new variables.
struct SimilarityChart {
  Generator generator;
  Expr xi;
  Expr eta;
  Bindings section;
};

/// Supported: c1 X1 + c2 X2 + c3 X3 with rational c (not all zero), k X4,
/// and k X4 + c X3. Invariants are chosen deterministically.
SimilarityChart characteristic_invariants(const Generator& v);

/// Builds a chart from given invariants, checking V(xi) = V(eta) = 0 and rank 2.
SimilarityChart make_chart(const Generator& v, const Expr& xi, const Expr& eta, const Bindings& section);

/// Symbols of the reduced chart and its dependent variables.
Symbol xi_symbol();
Symbol eta_symbol();
Symbol h_symbol();
Symbol g_symbol();

struct ReducedPDE {
  Expr residual;  // in jets of h and g over (xi, eta) and the parameters
};

ReducedPDE reduce_pde(const PDEInstance& pde, const SimilarityChart& chart);

struct ReductionCheck {
  bool passed = false;
  double max_discrepancy = 0.0;
  std::uint64_t seed = 0;
  int functions = 0;
  int points = 0;
};

/// Compares the original residual on u = h(xi, eta), f = g(xi, eta) with the
/// reduced residual for random polynomial h and g.
ReductionCheck verify_reduction(const PDEInstance& pde, const SimilarityChart& chart, const ReducedPDE& reduced,
                                std::uint64_t seed = 42, int functions = 10, int points = 20);

/// Published reduction table. Row i (1-based) belongs to the i-th generator
/// of `reduction_table_generators()`.
const std::vector<std::string>& printed_reduction_table();
std::vector<Generator> reduction_table_generators();
/// 1-based row of the published table for this generator, if any.
std::optional<std::size_t> reduction_table_row(const Generator& v);

struct ReductionAuditRow {
  std::size_t row = 0;
  std::string generator;
  std::string derived;
  std::string printed;
  std::vector<std::string> diff_terms;  // terms of printed - derived
  bool match = false;
};

struct ReductionAudit {
  std::vector<ReductionAuditRow> rows;
  std::vector<std::vector<std::size_t>> duplicate_rows;  // groups of textually identical rows
};

ReductionAudit audit_reduction_table(const PDEInstance& pde = PDEInstance::viscoelastic());

/// Terms of printed - derived, one string per term.
std::vector<std::string> diff_terms(const Expr& printed, const Expr& derived);

}  // namespace liesym
