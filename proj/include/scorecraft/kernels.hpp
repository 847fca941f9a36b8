#pragma once

#include "scorecraft/types.hpp"

#include <algorithm>
#include <cmath>

// Per-observation logistic accumulation: the O(n q^2) inner loop of every
// SQP iteration. `serial` is the plain reference; `parallel` splits rows
// into a fixed set of chunks (a function of n only) and adds the chunk
// partials in chunk order, so its output does not depend on thread count.
namespace scorecraft::kernels {

/// log(1 + exp(t)) without overflow.
inline double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

/// exp(t) / (1 + exp(t)).
inline double logistic(double t) {
  const double e = std::exp(-std::abs(t));
  return t >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

/// p (1 - p) from the same stable branch.
inline double logistic_variance(double t) {
  const double e = std::exp(-std::abs(t));
  return e / ((1.0 + e) * (1.0 + e));
}

struct LogisticAccumulation {
  Vector p;
  Vector g;        // X'[w .* (p - y)]
  Matrix hessian;  // X' diag(w p (1-p)) X
  double minus_ll = 0.0;
};

namespace serial {
LogisticAccumulation accumulate(const Matrix& x, const Vector& theta, const Vector& y, const Vector& w);
double minus_log_likelihood(const Vector& theta, const Vector& y, const Vector& w);
}  // namespace serial

namespace parallel {
/// Upper bound on the number of row chunks.
inline constexpr Eigen::Index kMaxChunks = 64;
/// Smallest chunk worth handing to a thread.
inline constexpr Eigen::Index kMinChunkRows = 256;

LogisticAccumulation accumulate(const Matrix& x, const Vector& theta, const Vector& y, const Vector& w,
                                int threads);
double minus_log_likelihood(const Vector& theta, const Vector& y, const Vector& w, int threads);
}  // namespace parallel

/// SCORECRAFT_THREADS if set to a positive integer, else 1.
int default_threads();

}  // namespace scorecraft::kernels
