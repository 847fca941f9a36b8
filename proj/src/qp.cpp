#include "scorecraft/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace scorecraft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Every constraint family stacked as l <= C x <= u: equality rows, then
// inequality rows, then one row per coordinate with a finite bound.
struct StackedRows {
  Matrix c;
  Vector l;
  Vector u;
  Eigen::Index n_eq = 0;
  Eigen::Index n_in = 0;
  std::vector<Eigen::Index> bound_coord;
};

StackedRows stack(const QpProblem& p) {
  StackedRows s;
  const auto q = p.q();
  const auto& cs = p.constraints;
  s.n_eq = cs.equality_count();
  s.n_in = cs.inequality_count();
  for (Eigen::Index j = 0; j < q; ++j) {
    if (std::isfinite(p.lower[j]) || std::isfinite(p.upper[j])) s.bound_coord.push_back(j);
  }
  const auto m = s.n_eq + s.n_in + static_cast<Eigen::Index>(s.bound_coord.size());
  s.c.setZero(m, q);
  s.l.resize(m);
  s.u.resize(m);
  s.c.topRows(s.n_eq) = cs.aeq;
  s.l.head(s.n_eq) = cs.beq;
  s.u.head(s.n_eq) = cs.beq;
  s.c.middleRows(s.n_eq, s.n_in) = cs.a;
  s.l.segment(s.n_eq, s.n_in).setConstant(-kInf);
  s.u.segment(s.n_eq, s.n_in) = cs.b;
  for (std::size_t k = 0; k < s.bound_coord.size(); ++k) {
    const auto r = s.n_eq + s.n_in + static_cast<Eigen::Index>(k);
    const auto j = s.bound_coord[k];
    s.c(r, j) = 1.0;
    s.l[r] = p.lower[j];
    s.u[r] = p.upper[j];
  }
  return s;
}

// Splits a stacked multiplier vector back into the public families, with
// sign clipping so inequality multipliers are dual feasible.
void unstack_multipliers(const StackedRows& s, const Vector& y, QpSolution& out) {
  out.eq_multipliers = y.head(s.n_eq);
  out.ineq_multipliers = y.segment(s.n_eq, s.n_in).cwiseMax(0.0);
  out.bound_multipliers = Vector();
  if (!s.bound_coord.empty()) {
    const auto q = s.c.cols();
    out.bound_multipliers = Vector::Zero(q);
    for (std::size_t k = 0; k < s.bound_coord.size(); ++k) {
      const auto r = s.n_eq + s.n_in + static_cast<Eigen::Index>(k);
      double v = y[r];
      if (!std::isfinite(s.u[r])) v = std::min(v, 0.0);
      if (!std::isfinite(s.l[r])) v = std::max(v, 0.0);
      out.bound_multipliers[s.bound_coord[k]] = v;
    }
  }
}

// Row states for the polish step.
enum : signed char { kInactive = 0, kUpper = 1, kLower = -1, kEquality = 2 };

class Polisher {
 public:
  Polisher(const QpProblem& p, const StackedRows& s, const QpSettings& settings)
      : p_(p), s_(s), settings_(settings) {
    const double scale = std::max(1.0, p.h.size() ? p.h.diagonal().cwiseAbs().maxCoeff() : 1.0);
    delta_ = 1e-11 * scale;
  }

  // Active-set refinement starting from `state`; returns a solution only
  // when it passes the KKT acceptance test.
  std::optional<QpSolution> run(std::vector<signed char> state) const {
    const auto m = s_.c.rows();
    const int max_rounds = 50;
    const double tol = settings_.eps_abs;
    for (int round = 0; round < max_rounds; ++round) {
      Vector x, y;
      solve_kkt(state, x, y);
      if (!x.allFinite() || !y.allFinite()) return std::nullopt;

      // Drop the active inequality whose multiplier has the wrong sign.
      Eigen::Index worst = -1;
      double worst_val = tol;
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto st = state[static_cast<std::size_t>(r)];
        const double wrong = st == kUpper ? -y[r] : st == kLower ? y[r] : 0.0;
        if (wrong > worst_val) {
          worst_val = wrong;
          worst = r;
        }
      }
      if (worst >= 0) {
        state[static_cast<std::size_t>(worst)] = kInactive;
        continue;
      }
      // Add the most violated inactive row.
      const Vector cx = s_.c * x;
      worst = -1;
      worst_val = tol * std::max(1.0, inf_norm(cx));
      signed char side = kInactive;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (state[static_cast<std::size_t>(r)] != kInactive) continue;
        if (cx[r] - s_.u[r] > worst_val) {
          worst_val = cx[r] - s_.u[r];
          worst = r;
          side = kUpper;
        }
        if (s_.l[r] - cx[r] > worst_val) {
          worst_val = s_.l[r] - cx[r];
          worst = r;
          side = kLower;
        }
      }
      if (worst >= 0) {
        state[static_cast<std::size_t>(worst)] = side;
        continue;
      }

      QpSolution sol;
      sol.beta = x;
      unstack_multipliers(s_, y, sol);
      sol.kkt = kkt_residuals(p_, sol.beta, sol.eq_multipliers, sol.ineq_multipliers, sol.bound_multipliers);
      sol.polished = true;
      if (kkt_acceptable(p_, sol, settings_)) {
        sol.status = QpStatus::optimal;
        return sol;
      }
      return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  // Solves the equality-constrained KKT system for the active rows with a
  // small primal/dual regularization, then refines against the exact system.
  void solve_kkt(const std::vector<signed char>& state, Vector& x, Vector& y) const {
    const auto q = p_.q();
    const auto m = s_.c.rows();
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (state[static_cast<std::size_t>(r)] != kInactive) rows.push_back(r);
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    Matrix kkt = Matrix::Zero(q + k, q + k);
    Vector rhs(q + k);
    kkt.topLeftCorner(q, q) = p_.h;
    rhs.head(q) = -p_.f;
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto r = rows[static_cast<std::size_t>(i)];
      kkt.block(q + i, 0, 1, q) = s_.c.row(r);
      kkt.block(0, q + i, q, 1) = s_.c.row(r).transpose();
      const auto st = state[static_cast<std::size_t>(r)];
      rhs[q + i] = st == kLower ? s_.l[r] : s_.u[r];
    }
    Matrix reg = kkt;
    reg.diagonal().head(q).array() += delta_;
    reg.diagonal().tail(k).array() -= delta_;
    const Eigen::PartialPivLU<Matrix> lu(reg);
    Vector sol = lu.solve(rhs);
    const double target = 1e-15 * std::max(1.0, inf_norm(rhs));
    for (int it = 0; it < 25; ++it) {
      const Vector r = rhs - kkt * sol;
      if (inf_norm(r) <= target) break;
      sol += lu.solve(r);
    }
    x = sol.head(q);
    y = Vector::Zero(m);
    for (Eigen::Index i = 0; i < k; ++i) y[rows[static_cast<std::size_t>(i)]] = sol[q + i];
  }

  const QpProblem& p_;
  const StackedRows& s_;
  const QpSettings& settings_;
  double delta_ = 1e-11;
};

}  // namespace

const char* status_name(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iterations: return "max_iterations";
    case QpStatus::infeasible: return "infeasible";
  }
  return "?";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal_eq, primal_ineq, dual, complementarity});
}

QpProblem QpProblem::make(Matrix h, Vector f, ConstraintSet constraints, std::optional<Vector> warm_start) {
  QpProblem p;
  p.h = 0.5 * (h + h.transpose());
  p.f = std::move(f);
  p.constraints = std::move(constraints);
  p.lower = Vector::Constant(p.f.size(), -kInf);
  p.upper = Vector::Constant(p.f.size(), kInf);
  p.warm_start = std::move(warm_start);
  return p;
}

void QpProblem::validate() const {
  const auto q = f.size();
  require_size("qp: H rows", h.rows(), q);
  require_size("qp: H cols", h.cols(), q);
  require_size("qp: lower bounds", lower.size(), q);
  require_size("qp: upper bounds", upper.size(), q);
  constraints.validate();
  require_size("qp: constraint columns", constraints.q(), q);
  if (warm_start) require_size("qp: warm start", warm_start->size(), q);
  if (!h.allFinite() || !f.allFinite() || !constraints.aeq.allFinite() || !constraints.a.allFinite() ||
      !constraints.beq.allFinite()) {
    throw ValidationError("qp: non-finite problem data");
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    if (lower[j] > upper[j]) throw ValidationError("qp: lower bound above upper bound");
  }
}

double QpProblem::objective(const Vector& x) const { return 0.5 * x.dot(h * x) + f.dot(x); }

KktResiduals kkt_residuals(const QpProblem& p, const Vector& beta, const Vector& mu, const Vector& nu,
                           const Vector& bound_mult) {
  const auto& cs = p.constraints;
  require_size("kkt: beta", beta.size(), p.q());
  require_size("kkt: equality multipliers", mu.size(), cs.equality_count());
  require_size("kkt: inequality multipliers", nu.size(), cs.inequality_count());
  if (bound_mult.size() != 0) require_size("kkt: bound multipliers", bound_mult.size(), p.q());

  KktResiduals r;
  Vector grad = p.h * beta + p.f + cs.aeq.transpose() * mu + cs.a.transpose() * nu;
  if (bound_mult.size() != 0) grad += bound_mult;
  r.stationarity = inf_norm(grad);
  if (cs.equality_count() > 0) r.primal_eq = inf_norm(cs.aeq * beta - cs.beq);
  if (cs.inequality_count() > 0) {
    const Vector slack = cs.a * beta - cs.b;
    r.primal_ineq = std::max(0.0, slack.maxCoeff());
    r.dual = std::max(0.0, -nu.minCoeff());
    r.complementarity = inf_norm(nu.cwiseProduct(slack));
  }
  for (Eigen::Index j = 0; j < p.q(); ++j) {
    const double lo = p.lower.size() ? p.lower[j] : -kInf;
    const double hi = p.upper.size() ? p.upper[j] : kInf;
    r.primal_ineq = std::max({r.primal_ineq, beta[j] - hi, lo - beta[j]});
    if (bound_mult.size() == 0) continue;
    const double v = bound_mult[j];
    // Positive multipliers belong to the upper bound, negative to the lower.
    const double bound = v > 0.0 ? hi : lo;
    if (v == 0.0) continue;
    if (!std::isfinite(bound)) {
      r.dual = std::max(r.dual, std::abs(v));
    } else {
      r.complementarity = std::max(r.complementarity, std::abs(v * (beta[j] - bound)));
    }
  }
  return r;
}

bool kkt_acceptable(const QpProblem& p, const QpSolution& s, const QpSettings& settings) {
  const auto& cs = p.constraints;
  const auto& k = s.kkt;
  double stat_scale = std::max(inf_norm(p.h * s.beta), inf_norm(p.f));
  stat_scale = std::max(stat_scale, inf_norm(cs.aeq.transpose() * s.eq_multipliers));
  stat_scale = std::max(stat_scale, inf_norm(cs.a.transpose() * s.ineq_multipliers));
  if (s.bound_multipliers.size()) stat_scale = std::max(stat_scale, inf_norm(s.bound_multipliers));
  double prim_scale = std::max({inf_norm(cs.aeq * s.beta), inf_norm(cs.beq), inf_norm(cs.a * s.beta),
                                inf_norm(cs.b)});
  for (Eigen::Index j = 0; j < p.q(); ++j) {
    if (std::isfinite(p.lower[j]) || std::isfinite(p.upper[j])) prim_scale = std::max(prim_scale, std::abs(s.beta[j]));
  }
  const double stat_tol = settings.eps_abs + settings.eps_rel * stat_scale;
  const double prim_tol = settings.eps_abs + settings.eps_rel * prim_scale;
  double dual_scale = inf_norm(s.ineq_multipliers);
  if (s.bound_multipliers.size()) dual_scale = std::max(dual_scale, inf_norm(s.bound_multipliers));
  const double comp_tol = prim_tol * std::max(1.0, dual_scale);
  return k.stationarity <= stat_tol && k.primal_eq <= prim_tol && k.primal_ineq <= prim_tol &&
         k.dual <= settings.eps_abs && k.complementarity <= comp_tol;
}

QpSolution solve_qp(const QpProblem& p, const QpSettings& settings) {
  p.validate();
  const auto q = p.q();
  const StackedRows s = stack(p);
  const auto m = s.c.rows();
  const Polisher polisher(p, s, settings);

  Vector x = p.warm_start ? *p.warm_start : Vector::Zero(q);
  Vector z = (s.c * x).cwiseMax(s.l).cwiseMin(s.u);
  Vector y = Vector::Zero(m);

  auto finish = [&](QpSolution sol, int iters) {
    sol.iterations = iters;
    return sol;
  };

  std::optional<std::vector<signed char>> last_tried;
  auto guess_active = [&](const Vector& cx, const Vector& yy, bool from_start) {
    std::vector<signed char> st(static_cast<std::size_t>(m), kInactive);
    for (Eigen::Index r = 0; r < m; ++r) {
      auto& v = st[static_cast<std::size_t>(r)];
      if (s.l[r] == s.u[r]) {
        v = kEquality;
      } else if (from_start) {
        const double tol = 1e-9 * std::max(1.0, std::abs(cx[r]));
        if (cx[r] >= s.u[r] - tol) v = kUpper;
        if (cx[r] <= s.l[r] + tol) v = kLower;
      } else {
        if (std::isfinite(s.u[r]) && s.u[r] - cx[r] < yy[r]) v = kUpper;
        if (std::isfinite(s.l[r]) && cx[r] - s.l[r] < -yy[r]) v = kLower;
      }
    }
    return st;
  };
  auto try_polish = [&](std::vector<signed char> st) -> std::optional<QpSolution> {
    if (!settings.polish || (last_tried && st == *last_tried)) return std::nullopt;
    last_tried = st;
    return polisher.run(std::move(st));
  };

  if (auto sol = try_polish(guess_active(s.c * x, y, true))) return finish(std::move(*sol), 0);

  Vector rho(m);
  double rho_scalar = settings.rho;
  auto set_rho = [&](double base) {
    for (Eigen::Index r = 0; r < m; ++r) rho[r] = (s.l[r] == s.u[r]) ? 1e3 * base : base;
  };
  set_rho(rho_scalar);
  Eigen::LLT<Matrix> llt;
  auto factor = [&]() {
    Matrix kkt = p.h + s.c.transpose() * rho.asDiagonal() * s.c;
    kkt.diagonal().array() += settings.sigma;
    llt.compute(kkt);
    if (llt.info() != Eigen::Success) {
      throw ValidationError("qp: H is not positive semidefinite");
    }
  };
  factor();

  const double alpha = settings.alpha;
  Vector x_prev = x;
  Vector y_prev = y;
  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    const bool check = iter % settings.check_interval == 0 || iter == settings.max_iters;
    if (check) {
      x_prev = x;
      y_prev = y;
    }
    const Vector rhs = settings.sigma * x - p.f + s.c.transpose() * (rho.cwiseProduct(z) - y);
    const Vector xt = llt.solve(rhs);
    const Vector zt = s.c * xt;
    x = alpha * xt + (1.0 - alpha) * x;
    const Vector zr = alpha * zt + (1.0 - alpha) * z;
    const Vector z_new = (zr + y.cwiseQuotient(rho)).cwiseMax(s.l).cwiseMin(s.u);
    y += rho.cwiseProduct(zr - z_new);
    z = z_new;
    if (!check) continue;

    const Vector cx = s.c * x;
    const Vector hx = p.h * x;
    const Vector cty = s.c.transpose() * y;
    const double r_prim = inf_norm(cx - z);
    const double r_dual = inf_norm(hx + p.f + cty);
    const double prim_scale = std::max(inf_norm(cx), inf_norm(z));
    const double dual_scale = std::max({inf_norm(hx), inf_norm(cty), inf_norm(p.f)});

    if (auto sol = try_polish(guess_active(cx, y, false))) return finish(std::move(*sol), iter);

    if (r_prim <= settings.eps_abs + settings.eps_rel * prim_scale &&
        r_dual <= settings.eps_abs + settings.eps_rel * dual_scale) {
      QpSolution sol;
      sol.beta = x;
      unstack_multipliers(s, y, sol);
      sol.kkt = kkt_residuals(p, sol.beta, sol.eq_multipliers, sol.ineq_multipliers, sol.bound_multipliers);
      if (kkt_acceptable(p, sol, settings)) {
        sol.status = QpStatus::optimal;
        return finish(std::move(sol), iter);
      }
    }

    // Primal infeasibility certificate: dy with C'dy ~ 0 and u'dy+ + l'dy- < 0.
    const Vector dy = y - y_prev;
    const double dy_norm = inf_norm(dy);
    if (m > 0 && dy_norm > 1e-6 * std::max(1.0, inf_norm(y_prev))) {
      const double eps = settings.eps_infeasible * dy_norm;
      bool certificate = inf_norm(s.c.transpose() * dy) <= eps;
      double support = 0.0;
      for (Eigen::Index r = 0; certificate && r < m; ++r) {
        if (dy[r] > eps) {
          if (!std::isfinite(s.u[r])) certificate = false;
          else support += s.u[r] * dy[r];
        } else if (dy[r] < -eps) {
          if (!std::isfinite(s.l[r])) certificate = false;
          else support += s.l[r] * dy[r];
        }
      }
      if (certificate && support < -eps) {
        QpSolution sol;
        sol.beta = x;
        unstack_multipliers(s, y, sol);
        sol.kkt = kkt_residuals(p, sol.beta, sol.eq_multipliers, sol.ineq_multipliers, sol.bound_multipliers);
        sol.status = QpStatus::infeasible;
        sol.note = "primal infeasible; certificate combines rows:";
        const Vector dir = dy / dy_norm;
        for (Eigen::Index r = 0; r < m; ++r) {
          if (std::abs(dir[r]) < 1e-6) continue;
          if (r < s.n_eq) {
            sol.note += " eq" + std::to_string(r + 1) + "(" + p.constraints.eq_rows[static_cast<std::size_t>(r)].describe() + ")";
          } else if (r < s.n_eq + s.n_in) {
            const auto i = r - s.n_eq;
            sol.note += " ineq" + std::to_string(i + 1) + "(" + p.constraints.ineq_rows[static_cast<std::size_t>(i)].describe() + ")";
          } else {
            sol.note += " bound(x" + std::to_string(s.bound_coord[static_cast<std::size_t>(r - s.n_eq - s.n_in)] + 1) + ")";
          }
        }
        return finish(std::move(sol), iter);
      }
    }

    // Dual infeasibility: a descent direction of the objective along the
    // recession cone of the feasible set.
    const Vector dx = x - x_prev;
    const double dx_norm = inf_norm(dx);
    if (dx_norm > 1e-6 * std::max(1.0, inf_norm(x_prev))) {
      const double eps = settings.eps_infeasible * dx_norm;
      bool unbounded = inf_norm(p.h * dx) <= eps && p.f.dot(dx) < -eps;
      const Vector cdx = s.c * dx;
      for (Eigen::Index r = 0; unbounded && r < m; ++r) {
        if (std::isfinite(s.u[r]) && cdx[r] > eps) unbounded = false;
        if (std::isfinite(s.l[r]) && cdx[r] < -eps) unbounded = false;
      }
      if (unbounded) {
        QpSolution sol;
        sol.beta = x;
        unstack_multipliers(s, y, sol);
        sol.kkt = kkt_residuals(p, sol.beta, sol.eq_multipliers, sol.ineq_multipliers, sol.bound_multipliers);
        sol.status = QpStatus::max_iterations;
        sol.note = "objective appears unbounded below on the feasible set";
        return finish(std::move(sol), iter);
      }
    }

    if (settings.adaptive_rho && m > 0) {
      const double num = r_prim / std::max(prim_scale, 1e-30);
      const double den = r_dual / std::max(dual_scale, 1e-30);
      if (num > 0.0 && den > 0.0) {
        const double est = std::clamp(rho_scalar * std::sqrt(num / den), 1e-6, 1e6);
        if (est > 5.0 * rho_scalar || est < 0.2 * rho_scalar) {
          rho_scalar = est;
          set_rho(rho_scalar);
          factor();
        }
      }
    }
  }

  QpSolution sol;
  sol.beta = x;
  unstack_multipliers(s, y, sol);
  sol.kkt = kkt_residuals(p, sol.beta, sol.eq_multipliers, sol.ineq_multipliers, sol.bound_multipliers);
  sol.status = kkt_acceptable(p, sol, settings) ? QpStatus::optimal : QpStatus::max_iterations;
  if (sol.status != QpStatus::optimal) sol.note = "tolerances not met within max_iters";
  return finish(std::move(sol), settings.max_iters);
}

}  // namespace scorecraft
