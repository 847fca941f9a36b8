#pragma once

#include "scorecraft/model.hpp"

#include <string>
#include <vector>

namespace scorecraft {

enum class RowKind { fixed, centering, cross, group, inweight, pattern };

const char* row_kind_name(RowKind kind);

/// Where a compiled row came from.
struct RowProvenance {
  RowKind kind = RowKind::fixed;
  std::vector<int> attributes;  // global att numbers; 0 denotes the intercept

  std::string describe() const;
};

/// Linear system over beta (intercept in column 0):
///   aeq * beta = beq,   a * beta <= b.
struct ConstraintSet {
  Matrix aeq;
  Vector beq;
  Matrix a;
  Vector b;
  std::vector<RowProvenance> eq_rows;
  std::vector<RowProvenance> ineq_rows;

  /// Empty system over q coefficients.
  static ConstraintSet none(Eigen::Index q);

  Eigen::Index q() const { return aeq.cols(); }
  Eigen::Index equality_count() const { return aeq.rows(); }
  Eigen::Index inequality_count() const { return a.rows(); }

  /// Throws ValidationError when shapes or provenance lengths disagree.
  void validate() const;
};

enum class CenteringMode { none, weighted_sum_zero };

/// Centering adds one row per characteristic: sum_a n_a * S_a = 0, where
/// n_a is the weighted observation count of attribute a.
struct CenteringPolicy {
  CenteringMode mode = CenteringMode::none;
  Vector attribute_counts;  // length q - 1, indexed by att - 1

  static CenteringPolicy off() { return {}; }
  /// Counts come from the design matrix columns weighted by w.
  static CenteringPolicy weighted(const Matrix& design, const Vector& w);
};

/// Pins coefficient `coefficient` (1 = intercept, k + 1 = attribute k) to
/// `value`.
struct InWeight {
  int coefficient = 1;
  double value = 0.0;
};

/// Compiles tags into linear rows. Ordering tags become non-strict rows
/// with zero right-hand side:
///   "a > k"  ->  S_k - S_a <= 0
///   "a < k"  ->  S_a - S_k <= 0
/// Equality rows come first from tags (in att order), then centering, then
/// in-weights.
ConstraintSet compile_constraints(const ScorecardSpec& spec, const CenteringPolicy& policy = {},
                                  const std::vector<InWeight>& inweights = {});

struct ConstraintResiduals {
  double eq = 0.0;    // max |aeq beta - beq|
  double ineq = 0.0;  // max (a beta - b)_+
};

ConstraintResiduals constraint_residuals(const ConstraintSet& cs, const Vector& beta);

struct RowViolation {
  bool equality = false;
  Eigen::Index row = 0;
  double amount = 0.0;
  RowProvenance provenance;
};

struct FeasibilityReport {
  bool feasible = true;
  ConstraintResiduals residuals;
  std::vector<RowViolation> violations;

  std::string describe() const;
};

FeasibilityReport check_feasible(const ConstraintSet& cs, const Vector& beta, double tol);

/// Human-readable provenance table used by `scorecraft compile`.
std::string format_provenance(const ConstraintSet& cs);

}  // namespace scorecraft
