#include "scorecraft/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using scorecraft::Matrix;
using scorecraft::Vector;

struct Problem {
  Matrix x;
  Vector theta;
  Vector y;
  Vector w;
};

// Indicator design shaped like a scorecard: intercept plus one hot attribute
// per characteristic.
Problem make_problem(Eigen::Index n, Eigen::Index chars, Eigen::Index per_char) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<Eigen::Index> pick(0, per_char - 1);
  std::normal_distribution<double> normal(0.0, 0.3);
  Problem p;
  p.x = Matrix::Zero(n, 1 + chars * per_char);
  p.x.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < chars; ++c) p.x(i, 1 + c * per_char + pick(rng)) = 1.0;
  }
  Vector beta(p.x.cols());
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta[j] = normal(rng);
  p.theta = p.x * beta;
  p.y.resize(n);
  p.w = Vector::Ones(n);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < n; ++i) p.y[i] = coin(rng) ? 1.0 : 0.0;
  return p;
}

const Problem& scorecard_problem() {
  static const Problem p = make_problem(10000, 19, 9);  // q = 172
  return p;
}

void BM_SerialAccumulate(benchmark::State& state) {
  const Problem& p = scorecard_problem();
  for (auto _ : state) {
    auto acc = scorecraft::kernels::serial::accumulate(p.x, p.theta, p.y, p.w);
    benchmark::DoNotOptimize(acc.hessian.data());
  }
}
BENCHMARK(BM_SerialAccumulate)->Unit(benchmark::kMillisecond);

void BM_ParallelAccumulate(benchmark::State& state) {
  const Problem& p = scorecard_problem();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto acc = scorecraft::kernels::parallel::accumulate(p.x, p.theta, p.y, p.w, threads);
    benchmark::DoNotOptimize(acc.hessian.data());
  }
}
BENCHMARK(BM_ParallelAccumulate)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SerialMinusLogLikelihood(benchmark::State& state) {
  const Problem& p = scorecard_problem();
  for (auto _ : state) benchmark::DoNotOptimize(scorecraft::kernels::serial::minus_log_likelihood(p.theta, p.y, p.w));
}
BENCHMARK(BM_SerialMinusLogLikelihood);

void BM_ParallelMinusLogLikelihood(benchmark::State& state) {
  const Problem& p = scorecard_problem();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scorecraft::kernels::parallel::minus_log_likelihood(p.theta, p.y, p.w, threads));
  }
}
BENCHMARK(BM_ParallelMinusLogLikelihood)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
