#include "test_support.hpp"

#include "scorecraft/csv.hpp"

#include <atomic>
#include <cmath>

#include <unistd.h>

namespace scorecraft::testkit {

std::string fixture_path(const std::string& name) { return std::string(SCORECRAFT_FIXTURE_DIR) + "/" + name; }

ScorecardSpec fixture_spec() { return load_spec(fixture_path("scorecard.csv")); }

Matrix random_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index q) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < q; ++j) x(i, j) = normal(rng);
  }
  return x;
}

Vector random_outcomes(std::mt19937_64& rng, const Matrix& x, const Vector& beta) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vector theta = x * beta;
  for (;;) {
    Vector y(x.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = u(rng) < 1.0 / (1.0 + std::exp(-theta[i])) ? 1.0 : 0.0;
    if (y.sum() > 0.0 && y.sum() < static_cast<double>(y.size())) return y;
  }
}

Vector random_weights(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = u(rng);
  return w;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

ConstraintSet random_constraints_around(std::mt19937_64& rng, const Vector& point, int m_eq, int m_in) {
  const auto q = point.size();
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  std::bernoulli_distribution active(0.4);
  ConstraintSet cs = ConstraintSet::none(q);
  cs.aeq.resize(m_eq, q);
  cs.beq.resize(m_eq);
  for (int r = 0; r < m_eq; ++r) {
    cs.aeq.row(r) = random_vector(rng, q).transpose();
    cs.beq[r] = cs.aeq.row(r).dot(point);
    cs.eq_rows.push_back({RowKind::fixed, {}});
  }
  cs.a.resize(m_in, q);
  cs.b.resize(m_in);
  for (int r = 0; r < m_in; ++r) {
    cs.a.row(r) = random_vector(rng, q).transpose();
    cs.b[r] = cs.a.row(r).dot(point) + (active(rng) ? 0.0 : slack(rng));
    cs.ineq_rows.push_back({RowKind::pattern, {}});
  }
  return cs;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  root_ = std::filesystem::temp_directory_path() /
          ("scorecraft-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(root_);
  std::filesystem::create_directories(root_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(root_, ec);
}

std::string slurp(const std::string& path) { return csv::read_file(path); }

}  // namespace scorecraft::testkit
