#include "scorecraft/kernels.hpp"

#include <cstdlib>
#include <string>
#include <vector>

namespace scorecraft::kernels {

namespace {

void check_inputs(const Matrix& x, const Vector& theta, const Vector& y, const Vector& w) {
  require_size("logistic: theta", theta.size(), x.rows());
  require_size("logistic: y", y.size(), x.rows());
  require_size("logistic: w", w.size(), x.rows());
}

struct ChunkPlan {
  Eigen::Index count = 0;
  Eigen::Index size = 0;
};

ChunkPlan plan(Eigen::Index n) {
  if (n == 0) return {};
  const Eigen::Index by_size = (n + parallel::kMinChunkRows - 1) / parallel::kMinChunkRows;
  const Eigen::Index count = std::min(by_size, parallel::kMaxChunks);
  return {count, (n + count - 1) / count};
}

// Row-ordered sum of the per-observation terms within [begin, end).
double chunk_minus_ll(const Vector& theta, const Vector& y, const Vector& w, Eigen::Index begin,
                      Eigen::Index end) {
  double m = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) m += w[i] * (softplus(theta[i]) - y[i] * theta[i]);
  return m;
}

}  // namespace

namespace serial {

LogisticAccumulation accumulate(const Matrix& x, const Vector& theta, const Vector& y, const Vector& w) {
  check_inputs(x, theta, y, w);
  const auto n = x.rows();
  const auto q = x.cols();
  LogisticAccumulation out;
  out.p.resize(n);
  out.g = Vector::Zero(q);
  out.hessian = Matrix::Zero(q, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = theta[i];
    const double p = logistic(t);
    out.p[i] = p;
    const double r = w[i] * (p - y[i]);
    const double v = w[i] * logistic_variance(t);
    out.minus_ll += w[i] * (softplus(t) - y[i] * t);
    for (Eigen::Index k = 0; k < q; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      out.g[k] += r * xik;
      for (Eigen::Index h = 0; h <= k; ++h) out.hessian(k, h) += v * xik * x(i, h);
    }
  }
  for (Eigen::Index k = 0; k < q; ++k) {
    for (Eigen::Index h = 0; h < k; ++h) out.hessian(h, k) = out.hessian(k, h);
  }
  return out;
}

double minus_log_likelihood(const Vector& theta, const Vector& y, const Vector& w) {
  require_size("mlrll: y", y.size(), theta.size());
  require_size("mlrll: w", w.size(), theta.size());
  return chunk_minus_ll(theta, y, w, 0, theta.size());
}

}  // namespace serial

namespace parallel {

LogisticAccumulation accumulate(const Matrix& x, const Vector& theta, const Vector& y, const Vector& w,
                                int threads) {
  check_inputs(x, theta, y, w);
  const auto n = x.rows();
  const auto q = x.cols();
  const ChunkPlan chunks = plan(n);

  LogisticAccumulation out;
  out.p.resize(n);
  out.g = Vector::Zero(q);
  out.hessian = Matrix::Zero(q, q);
  std::vector<Vector> g_part(static_cast<std::size_t>(chunks.count), Vector::Zero(q));
  std::vector<Matrix> h_part(static_cast<std::size_t>(chunks.count), Matrix::Zero(q, q));
  std::vector<double> m_part(static_cast<std::size_t>(chunks.count), 0.0);

#pragma omp parallel for num_threads(std::max(threads, 1)) schedule(static)
  for (Eigen::Index c = 0; c < chunks.count; ++c) {
    const Eigen::Index begin = c * chunks.size;
    const Eigen::Index end = std::min(n, begin + chunks.size);
    auto& g = g_part[static_cast<std::size_t>(c)];
    auto& h = h_part[static_cast<std::size_t>(c)];
    // Indicator designs are mostly zeros, so each row only updates the
    // lower triangle over its nonzero columns.
    std::vector<Eigen::Index> nz;
    nz.reserve(static_cast<std::size_t>(q));
    for (Eigen::Index i = begin; i < end; ++i) {
      const double t = theta[i];
      const double p = logistic(t);
      out.p[i] = p;
      const double r = w[i] * (p - y[i]);
      const double v = w[i] * logistic_variance(t);
      nz.clear();
      for (Eigen::Index k = 0; k < q; ++k) {
        if (x(i, k) != 0.0) nz.push_back(k);
      }
      for (std::size_t a = 0; a < nz.size(); ++a) {
        const Eigen::Index k = nz[a];
        const double vxk = v * x(i, k);
        g[k] += r * x(i, k);
        for (std::size_t b = 0; b <= a; ++b) h(k, nz[b]) += vxk * x(i, nz[b]);
      }
    }
    m_part[static_cast<std::size_t>(c)] = chunk_minus_ll(theta, y, w, begin, end);
  }

  for (Eigen::Index c = 0; c < chunks.count; ++c) {
    out.g += g_part[static_cast<std::size_t>(c)];
    out.hessian += h_part[static_cast<std::size_t>(c)];
    out.minus_ll += m_part[static_cast<std::size_t>(c)];
  }
  for (Eigen::Index k = 0; k < q; ++k) {
    for (Eigen::Index j = 0; j < k; ++j) out.hessian(j, k) = out.hessian(k, j);
  }
  return out;
}

double minus_log_likelihood(const Vector& theta, const Vector& y, const Vector& w, int threads) {
  require_size("mlrll: y", y.size(), theta.size());
  require_size("mlrll: w", w.size(), theta.size());
  const auto n = theta.size();
  const ChunkPlan chunks = plan(n);
  std::vector<double> m_part(static_cast<std::size_t>(chunks.count), 0.0);
#pragma omp parallel for num_threads(std::max(threads, 1)) schedule(static)
  for (Eigen::Index c = 0; c < chunks.count; ++c) {
    const Eigen::Index begin = c * chunks.size;
    m_part[static_cast<std::size_t>(c)] = chunk_minus_ll(theta, y, w, begin, std::min(n, begin + chunks.size));
  }
  double m = 0.0;
  for (double v : m_part) m += v;
  return m;
}

}  // namespace parallel

int default_threads() {
  if (const char* env = std::getenv("SCORECRAFT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace scorecraft::kernels
