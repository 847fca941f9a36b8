#pragma once

#include "scorecraft/constraints.hpp"
#include "scorecraft/qp.hpp"

#include <string>
#include <vector>

namespace scorecraft {

/// Quantities of the logistic model at one coefficient vector.
struct LogisticTerms {
  Vector theta;  // X beta
  Vector p;      // Pr{y = 1}
  Vector g;      // gradient of M
  Matrix G;      // Hessian of M
  double M = 0.0;
};

LogisticTerms logistic_terms(const Matrix& x, const Vector& y, const Vector& w, const Vector& beta,
                             int threads = 1);

/// Minus log likelihood, w'[log(1 + exp(theta)) - y .* theta]. Bitwise equal
/// to logistic_terms(...).M for the same inputs.
double mlrll(const Matrix& x, const Vector& y, const Vector& w, const Vector& beta, int threads = 1);

/// Ridge penalty (lambda / (q - 1)) * beta' Ir beta, where Ir is the
/// identity with the intercept entry zeroed.
struct PenaltySpec {
  double lambda = 0.0;

  /// diag(Ir) for q coefficients.
  static Vector ir_diagonal(Eigen::Index q);
  static Matrix ir(Eigen::Index q);
  /// lambda / (q - 1) * S'S.
  double value(const Vector& beta) const;
};

/// H = G + (2 lambda / (q - 1)) Ir,  f = g - G beta_hat, warm start beta_hat.
QpProblem assemble_qp(const LogisticTerms& terms, const PenaltySpec& pen, const Vector& beta_hat,
                      const ConstraintSet& cs);

/// Thrown when the per-iteration QP does not reach `optimal`.
class StepFailure : public NumericalError {
 public:
  StepFailure(const std::string& what, QpSolution solution)
      : NumericalError(what), solution_(std::move(solution)) {}
  const QpSolution& solution() const { return solution_; }

 private:
  QpSolution solution_;
};

struct StepData {
  const Matrix& x;
  const Vector& y;
  const Vector& w;
  PenaltySpec penalty;
  const ConstraintSet& constraints;
  QpSettings qp;
  int threads = 1;
};

/// One SQP iteration: minimizes the local quadratic model of the penalized
/// objective under the constraints. Throws StepFailure on QP failure.
QpSolution sqp_step(const StepData& data, const Vector& beta_in);

/// The same step posed as constrained weighted least squares on the IRLS
/// working response z = theta + (y - p) / (p (1 - p)). Built independently
/// of logistic_terms; used as an equivalence check on sqp_step.
QpSolution ircls_step(const StepData& data, const Vector& beta_in);

enum class InitialBetaMode { log_pop_odds, supplied };

struct InitialBetaPolicy {
  InitialBetaMode mode = InitialBetaMode::log_pop_odds;
  Vector supplied;
};

/// Default: intercept = log(sum w y / sum w (1 - y)), attributes zero.
Vector initial_beta(const Vector& y, const Vector& w, Eigen::Index q, const InitialBetaPolicy& policy = {});

struct FitConfig {
  double lambda = 0.0;
  double tol = 1e-6;  // on max |beta_out - beta_in|
  int max_outer_iters = 50;
  QpSettings qp;
  InitialBetaPolicy initial;
  int threads = 1;
  double feasibility_tol = 1e-8;
};

struct IterationRecord {
  int iteration = 0;
  double max_delta = 0.0;
  double minus_ll = 0.0;     // at beta_out
  double objective = 0.0;    // minus_ll + penalty at beta_out
  int qp_iterations = 0;
};

enum class FitStatus { converged, max_iterations };
const char* fit_status_name(FitStatus s);

struct FitResult {
  Vector beta;  // beta[0] is the intercept
  std::vector<IterationRecord> trajectory;
  FitStatus status = FitStatus::max_iterations;
  /// Optimality residuals of the penalized constrained problem at beta,
  /// using the last QP's multipliers.
  KktResiduals kkt;
  ConstraintResiduals constraint_residuals;
  Vector eq_multipliers;
  Vector ineq_multipliers;
  std::vector<std::string> warnings;
  double minus_ll = 0.0;
};

/// Repeats sqp_step until max|delta beta| <= tol, taking full steps.
FitResult fit(const Matrix& x, const Vector& y, const Vector& w, const PenaltySpec& pen, const ConstraintSet& cs,
              const FitConfig& config = {});

}  // namespace scorecraft
