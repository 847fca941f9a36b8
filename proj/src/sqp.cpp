#include "scorecraft/sqp.hpp"

#include "scorecraft/kernels.hpp"

#include <cmath>

namespace scorecraft {

namespace {

void check_data(const Matrix& x, const Vector& y, const Vector& w, const Vector& beta) {
  require_size("logistic: y", y.size(), x.rows());
  require_size("logistic: w", w.size(), x.rows());
  require_size("logistic: beta", beta.size(), x.cols());
}

double penalty_scale(double lambda, Eigen::Index q) {
  if (lambda < 0.0 || !std::isfinite(lambda)) throw ValidationError("penalty: lambda must be finite and >= 0");
  if (lambda == 0.0) return 0.0;
  if (q < 2) throw ValidationError("penalty: lambda > 0 needs at least one non-intercept coefficient");
  return 2.0 * lambda / static_cast<double>(q - 1);
}

}  // namespace

LogisticTerms logistic_terms(const Matrix& x, const Vector& y, const Vector& w, const Vector& beta, int threads) {
  check_data(x, y, w, beta);
  LogisticTerms t;
  t.theta = x * beta;
  auto acc = kernels::parallel::accumulate(x, t.theta, y, w, threads);
  t.p = std::move(acc.p);
  t.g = std::move(acc.g);
  t.G = std::move(acc.hessian);
  t.M = acc.minus_ll;
  return t;
}

double mlrll(const Matrix& x, const Vector& y, const Vector& w, const Vector& beta, int threads) {
  check_data(x, y, w, beta);
  const Vector theta = x * beta;
  return kernels::parallel::minus_log_likelihood(theta, y, w, threads);
}

Vector PenaltySpec::ir_diagonal(Eigen::Index q) {
  Vector d = Vector::Ones(q);
  if (q > 0) d[0] = 0.0;
  return d;
}

Matrix PenaltySpec::ir(Eigen::Index q) { return ir_diagonal(q).asDiagonal(); }

double PenaltySpec::value(const Vector& beta) const {
  if (lambda == 0.0) return 0.0;
  return 0.5 * penalty_scale(lambda, beta.size()) * beta.tail(beta.size() - 1).squaredNorm();
}

QpProblem assemble_qp(const LogisticTerms& terms, const PenaltySpec& pen, const Vector& beta_hat,
                      const ConstraintSet& cs) {
  const auto q = beta_hat.size();
  require_size("assemble_qp: gradient", terms.g.size(), q);
  require_size("assemble_qp: Hessian", terms.G.rows(), q);
  Matrix h = terms.G;
  h.diagonal() += penalty_scale(pen.lambda, q) * PenaltySpec::ir_diagonal(q);
  Vector f = terms.g - terms.G * beta_hat;
  return QpProblem::make(std::move(h), std::move(f), cs, beta_hat);
}

namespace {

QpSolution solve_step(const QpProblem& problem, const QpSettings& settings, const char* which) {
  QpSolution sol = solve_qp(problem, settings);
  if (sol.status != QpStatus::optimal) {
    std::string msg = std::string(which) + ": QP " + status_name(sol.status);
    if (!sol.note.empty()) msg += " (" + sol.note + ")";
    throw StepFailure(msg, std::move(sol));
  }
  return sol;
}

}  // namespace

QpSolution sqp_step(const StepData& d, const Vector& beta_in) {
  const LogisticTerms terms = logistic_terms(d.x, d.y, d.w, beta_in, d.threads);
  return solve_step(assemble_qp(terms, d.penalty, beta_in, d.constraints), d.qp, "sqp step");
}

QpSolution ircls_step(const StepData& d, const Vector& beta_in) {
  check_data(d.x, d.y, d.w, beta_in);
  const auto n = d.x.rows();
  const auto q = d.x.cols();
  const Vector theta = d.x * beta_in;
  Vector weight(n);
  Vector response(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = theta[i];
    const double p = std::exp(t - kernels::softplus(t));
    const double pq = std::exp(-std::abs(t)) / std::pow(1.0 + std::exp(-std::abs(t)), 2);
    if (!(pq > 0.0) || !std::isfinite(1.0 / pq)) {
      throw NumericalError("ircls step: degenerate IRLS weight p(1-p) at observation " + std::to_string(i + 1));
    }
    weight[i] = d.w[i] * pq;
    response[i] = t + (d.y[i] - p) / pq;
  }
  // minimize 1/2 sum v_i (z_i - x_i'b)^2 + lambda/(q-1) b'Ir b, up to a constant.
  Matrix h = d.x.transpose() * weight.asDiagonal() * d.x;
  h += penalty_scale(d.penalty.lambda, q) * PenaltySpec::ir(q);
  Vector f = -(d.x.transpose() * weight.cwiseProduct(response));
  return solve_step(QpProblem::make(std::move(h), std::move(f), d.constraints, beta_in), d.qp, "ircls step");
}

Vector initial_beta(const Vector& y, const Vector& w, Eigen::Index q, const InitialBetaPolicy& policy) {
  if (policy.mode == InitialBetaMode::supplied) {
    require_size("initial beta", policy.supplied.size(), q);
    return policy.supplied;
  }
  require_size("initial beta: w", w.size(), y.size());
  const double goods = w.dot(y);
  const double bads = w.sum() - goods;
  if (!(goods > 0.0) || !(bads > 0.0)) {
    throw ValidationError("initial beta: sample needs positive weight in both outcome classes");
  }
  Vector beta = Vector::Zero(q);
  beta[0] = std::log(goods / bads);
  return beta;
}

const char* fit_status_name(FitStatus s) {
  return s == FitStatus::converged ? "converged" : "max_iterations";
}

namespace {

// Counts flat directions of H on the null space of Aeq. Inequalities may
// still pin them, so this is only a warning.
int flat_directions(const Matrix& h, const Matrix& aeq) {
  const auto q = h.rows();
  Matrix basis;
  if (aeq.rows() == 0) {
    basis = Matrix::Identity(q, q);
  } else {
    Eigen::FullPivLU<Matrix> lu(aeq);
    lu.setThreshold(1e-10);
    basis = lu.kernel();
    if (lu.dimensionOfKernel() == 0) return 0;
  }
  // Orthonormalize the kernel basis before projecting.
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix z = qr.householderQ() * Matrix::Identity(q, basis.cols());
  const Matrix reduced = z.transpose() * h * z;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced, Eigen::EigenvaluesOnly);
  const Vector ev = eig.eigenvalues();
  const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
  int flat = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= 1e-10 * top) ++flat;
  }
  return flat;
}

}  // namespace

FitResult fit(const Matrix& x, const Vector& y, const Vector& w, const PenaltySpec& pen, const ConstraintSet& cs,
              const FitConfig& config) {
  if (!(config.tol > 0.0)) throw ValidationError("fit: tol must be > 0");
  if (config.max_outer_iters < 1) throw ValidationError("fit: max_outer_iters must be >= 1");
  cs.validate();
  require_size("fit: constraint columns", cs.q(), x.cols());
  require_size("fit: y", y.size(), x.rows());
  require_size("fit: w", w.size(), x.rows());

  FitResult result;
  Vector beta = initial_beta(y, w, x.cols(), config.initial);
  const StepData data{x, y, w, pen, cs, config.qp, config.threads};

  {
    const LogisticTerms t0 = logistic_terms(x, y, w, beta, config.threads);
    const QpProblem p0 = assemble_qp(t0, pen, beta, cs);
    if (const int flat = flat_directions(p0.h, cs.aeq); flat > 0) {
      result.warnings.push_back("objective has " + std::to_string(flat) +
                                " flat direction(s) on the equality-constrained subspace; "
                                "coefficients may not be unique");
    }
  }

  QpSolution last;
  bool separation_warned = false;
  for (int it = 1; it <= config.max_outer_iters; ++it) {
    last = sqp_step(data, beta);
    const double delta = (last.beta - beta).cwiseAbs().maxCoeff();
    beta = last.beta;
    IterationRecord rec;
    rec.iteration = it;
    rec.max_delta = delta;
    rec.minus_ll = mlrll(x, y, w, beta, config.threads);
    rec.objective = rec.minus_ll + pen.value(beta);
    rec.qp_iterations = last.iterations;
    result.trajectory.push_back(rec);
    if (!separation_warned && beta.cwiseAbs().maxCoeff() > 1e3 && delta > config.tol) {
      result.warnings.push_back("coefficients exceed 1e3 in magnitude at iteration " + std::to_string(it) +
                                "; the data may be separable along an unconstrained direction");
      separation_warned = true;
    }
    if (delta <= config.tol) {
      result.status = FitStatus::converged;
      break;
    }
  }

  result.beta = beta;
  result.eq_multipliers = last.eq_multipliers;
  result.ineq_multipliers = last.ineq_multipliers;
  const LogisticTerms final_terms = logistic_terms(x, y, w, beta, config.threads);
  result.minus_ll = final_terms.M;
  // At beta, H beta + f of the local model equals the gradient of the
  // penalized objective, so these are the problem's own KKT residuals.
  const QpProblem at_solution = assemble_qp(final_terms, pen, beta, cs);
  result.kkt = kkt_residuals(at_solution, beta, last.eq_multipliers, last.ineq_multipliers);
  result.constraint_residuals = constraint_residuals(cs, beta);

  if (result.status == FitStatus::converged) {
    const auto report = check_feasible(cs, beta, config.feasibility_tol);
    if (!report.feasible) {
      throw NumericalError("fit: converged point violates constraints\n" + report.describe());
    }
  }
  return result;
}

}  // namespace scorecraft
