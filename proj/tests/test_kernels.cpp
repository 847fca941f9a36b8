#include "scorecraft/kernels.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

using namespace scorecraft;

namespace {

struct Data {
  Matrix x;
  Vector theta;
  Vector y;
  Vector w;
};

Data make(std::uint64_t seed, Eigen::Index n, Eigen::Index q) {
  std::mt19937_64 rng(seed);
  Data d;
  d.x = testkit::random_design(rng, n, q);
  const Vector beta = testkit::random_vector(rng, q, 0.5);
  d.theta = d.x * beta;
  std::bernoulli_distribution coin(0.4);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.y[i] = coin(rng) ? 1.0 : 0.0;
  d.w = testkit::random_weights(rng, n);
  return d;
}

}  // namespace

TEST(Softplus, StableAtExtremes) {
  EXPECT_EQ(kernels::softplus(1000.0), 1000.0);
  EXPECT_GT(kernels::softplus(-1000.0), -1.0);
  EXPECT_NEAR(kernels::softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(kernels::logistic(800.0), 1.0, 0.0);
  EXPECT_EQ(kernels::logistic(-800.0), 0.0);
  EXPECT_NEAR(kernels::logistic_variance(0.0), 0.25, 1e-15);
  EXPECT_TRUE(std::isfinite(kernels::logistic_variance(-800.0)));
}

TEST(Accumulate, ParallelMatchesSerial) {
  for (Eigen::Index n : {1, 7, 300, 5000}) {
    const Data d = make(static_cast<std::uint64_t>(n), n, 9);
    const auto s = kernels::serial::accumulate(d.x, d.theta, d.y, d.w);
    const auto p = kernels::parallel::accumulate(d.x, d.theta, d.y, d.w, 4);
    const double scale = 1.0 + s.hessian.cwiseAbs().maxCoeff();
    EXPECT_LE((s.p - p.p).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((s.g - p.g).cwiseAbs().maxCoeff(), 1e-11 * scale);
    EXPECT_LE((s.hessian - p.hessian).cwiseAbs().maxCoeff(), 1e-11 * scale);
    EXPECT_NEAR(s.minus_ll, p.minus_ll, 1e-11 * (1.0 + std::abs(s.minus_ll)));
    EXPECT_EQ(p.hessian, p.hessian.transpose());
  }
}

TEST(Accumulate, ThreadCountInvariant) {
  const Data d = make(77, 20000, 12);
  const auto one = kernels::parallel::accumulate(d.x, d.theta, d.y, d.w, 1);
  for (int threads : {2, 3, 8}) {
    const auto many = kernels::parallel::accumulate(d.x, d.theta, d.y, d.w, threads);
    EXPECT_EQ(one.g, many.g);
    EXPECT_EQ(one.hessian, many.hessian);
    EXPECT_EQ(one.minus_ll, many.minus_ll);
    EXPECT_EQ(kernels::parallel::minus_log_likelihood(d.theta, d.y, d.w, threads), one.minus_ll);
  }
}

TEST(Accumulate, EmptySample) {
  const Data d = make(1, 0, 3);
  const auto acc = kernels::parallel::accumulate(d.x, d.theta, d.y, d.w, 2);
  EXPECT_EQ(acc.g, Vector::Zero(3));
  EXPECT_EQ(acc.hessian, Matrix::Zero(3, 3));
  EXPECT_EQ(acc.minus_ll, 0.0);
}

TEST(DefaultThreads, ReadsEnvironment) {
  ::setenv("SCORECRAFT_THREADS", "3", 1);
  EXPECT_EQ(kernels::default_threads(), 3);
  ::setenv("SCORECRAFT_THREADS", "zero", 1);
  EXPECT_EQ(kernels::default_threads(), 1);
  ::unsetenv("SCORECRAFT_THREADS");
  EXPECT_EQ(kernels::default_threads(), 1);
}
