#pragma once

#include "scorecraft/constraints.hpp"

#include <optional>
#include <string>

namespace scorecraft {

/// minimize 1/2 x'Hx + f'x  s.t.  Aeq x = beq,  A x <= b,  lower <= x <= upper.
struct QpProblem {
  Matrix h;
  Vector f;
  ConstraintSet constraints;
  Vector lower;  // -inf by default
  Vector upper;  // +inf by default
  std::optional<Vector> warm_start;

  /// Symmetrizes h and sets infinite bounds.
  static QpProblem make(Matrix h, Vector f, ConstraintSet constraints,
                        std::optional<Vector> warm_start = std::nullopt);

  Eigen::Index q() const { return f.size(); }
  void validate() const;
  double objective(const Vector& x) const;
};

struct QpSettings {
  double eps_abs = 1e-9;
  double eps_rel = 1e-9;
  int max_iters = 200000;
  double sigma = 1e-6;  // proximal term inside the x-update only
  double rho = 0.1;
  double alpha = 1.6;   // over-relaxation
  double eps_infeasible = 1e-8;
  int check_interval = 25;
  bool polish = true;
  bool adaptive_rho = true;
};

enum class QpStatus { optimal, max_iterations, infeasible };
const char* status_name(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_ineq = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const;
};

struct QpSolution {
  Vector beta;
  Vector eq_multipliers;
  Vector ineq_multipliers;  // >= 0
  Vector bound_multipliers; // > 0 at an upper bound, < 0 at a lower bound
  QpStatus status = QpStatus::max_iterations;
  KktResiduals kkt;
  int iterations = 0;  // ADMM iterations; 0 when the warm-start active set solved it
  bool polished = false;
  std::string note;  // infeasibility certificate or failure detail
};

/// Operator-splitting (ADMM) solve with periodic active-set polishing.
///
/// The warm start, when present, is the first iterate and seeds the first
/// polish attempt with the constraints active there. `optimal` is reported
/// only when kkt_acceptable() holds for the returned point.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {});

/// First-order optimality residuals of a candidate primal/dual triple.
/// `bound_multipliers` may be empty when the problem has no finite bounds.
KktResiduals kkt_residuals(const QpProblem& problem, const Vector& beta, const Vector& eq_multipliers,
                           const Vector& ineq_multipliers, const Vector& bound_multipliers = Vector());

/// Tolerance test used for `optimal`: each residual is compared against
/// eps_abs + eps_rel * (magnitude of the terms it is built from).
bool kkt_acceptable(const QpProblem& problem, const QpSolution& candidate, const QpSettings& settings);

/// Text dump (JSON) of a problem; infinite bounds are written as null.
std::string write_qp_dump(const QpProblem& problem);
QpProblem read_qp_dump(const std::string& text);

}  // namespace scorecraft
