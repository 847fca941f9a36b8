#include "scorecraft/metrics.hpp"

#include "scorecraft/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace scorecraft {

namespace {

void check_lengths(const Vector& score, const Vector& y, const Vector& w) {
  require_size("metrics: y", y.size(), score.size());
  require_size("metrics: w", w.size(), score.size());
}

struct ClassMass {
  double good = 0.0;
  double bad = 0.0;
};

ClassMass class_mass(const Vector& y, const Vector& w) {
  ClassMass m;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw ValidationError("metrics: y must be 0 or 1");
    if (!(w[i] >= 0.0)) throw ValidationError("metrics: weights must be >= 0");
    (y[i] == 1.0 ? m.good : m.bad) += w[i];
  }
  if (!(m.good > 0.0) || !(m.bad > 0.0)) {
    throw ValidationError("metrics: both Goods and Bads need positive weight");
  }
  return m;
}

}  // namespace

ScoreCdfs scorecdfs(const Vector& score, const Vector& y, const Vector& w) {
  check_lengths(score, y, w);
  class_mass(y, w);  // validates labels, weights and class presence
  const auto n = score.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return score[a] < score[b]; });

  ScoreCdfs out;
  out.orscore.resize(n);
  out.fg.resize(n);
  out.fb.resize(n);
  double cg = 0.0;
  double cb = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = order[static_cast<std::size_t>(k)];
    out.orscore[k] = score[i];
    cg += w[i] * y[i];
    cb += w[i] * (1.0 - y[i]);
    out.fg[k] = cg;
    out.fb[k] = cb;
  }
  // Normalize by totals summed in the same order so both CDFs end at exactly 1.
  if (n > 0) {
    out.fg /= cg;
    out.fb /= cb;
  }
  return out;
}

RocStats roc(const Vector& score, const Vector& y, const Vector& w) {
  const ScoreCdfs c = scorecdfs(score, y, w);
  RocStats r;
  r.ks = (c.fb - c.fg).maxCoeff();
  for (Eigen::Index k = 1; k < c.fg.size(); ++k) {
    r.roc_area += 0.5 * (c.fg[k] - c.fg[k - 1]) * (c.fb[k] + c.fb[k - 1]);
  }
  return r;
}

double divergence(const Vector& score, const Vector& y, const Vector& w, VarianceKind kind) {
  check_lengths(score, y, w);
  const ClassMass mass = class_mass(y, w);
  double sum_g = 0.0, sum_b = 0.0;
  for (Eigen::Index i = 0; i < score.size(); ++i) (y[i] == 1.0 ? sum_g : sum_b) += w[i] * score[i];
  const double mu_g = sum_g / mass.good;
  const double mu_b = sum_b / mass.bad;
  double ss_g = 0.0, ss_b = 0.0;
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    if (y[i] == 1.0) ss_g += w[i] * (score[i] - mu_g) * (score[i] - mu_g);
    else ss_b += w[i] * (score[i] - mu_b) * (score[i] - mu_b);
  }
  double den_g = mass.good;
  double den_b = mass.bad;
  if (kind == VarianceKind::sample) {
    den_g -= 1.0;
    den_b -= 1.0;
    if (!(den_g > 0.0) || !(den_b > 0.0)) {
      throw ValidationError("divergence: sample variance needs class weight above 1");
    }
  }
  const double var = 0.5 * (ss_g / den_g + ss_b / den_b);
  if (!(var > 0.0)) throw ValidationError("divergence: both class score variances are zero");
  return (mu_g - mu_b) * (mu_g - mu_b) / var;
}

double score_minus_ll(const Vector& score, const Vector& y, const Vector& w) {
  check_lengths(score, y, w);
  return kernels::parallel::minus_log_likelihood(score, y, w, 1);
}

ScoreMetrics evaluate_score(const Vector& score, const Vector& y, const Vector& w, VarianceKind kind) {
  ScoreMetrics m;
  const RocStats r = roc(score, y, w);
  m.ks = r.ks;
  m.roc_area = r.roc_area;
  m.divergence = divergence(score, y, w, kind);
  m.minus_ll = score_minus_ll(score, y, w);
  return m;
}

ComparisonTable compare_scores(const std::vector<std::pair<std::string, Vector>>& scores, const Vector& y,
                               const Vector& w) {
  if (scores.empty()) throw ValidationError("compare: no scores given");
  ComparisonTable t;
  for (const auto& [name, s] : scores) t.rows.push_back({name, evaluate_score(s, y, w)});
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const auto& m = t.rows[i].metrics;
    if (m.divergence > t.rows[t.best_divergence].metrics.divergence) t.best_divergence = i;
    if (m.minus_ll < t.rows[t.best_minus_ll].metrics.minus_ll) t.best_minus_ll = i;
    if (m.ks > t.rows[t.best_ks].metrics.ks) t.best_ks = i;
    if (m.roc_area > t.rows[t.best_roc].metrics.roc_area) t.best_roc = i;
  }
  return t;
}

std::string ComparisonTable::format() const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %12s  %14s  %8s  %8s\n", static_cast<int>(width), "score", "divergence",
                "-log likelihood", "KS", "ROC area");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s  %12.4f  %14.4f  %8.4f  %8.4f\n", static_cast<int>(width), r.name.c_str(),
                  r.metrics.divergence, r.metrics.minus_ll, r.metrics.ks, r.metrics.roc_area);
    os << buf;
  }
  if (rows.size() > 1) {
    os << "highest divergence: " << rows[best_divergence].name << '\n'
       << "lowest -log likelihood: " << rows[best_minus_ll].name << '\n'
       << "highest KS: " << rows[best_ks].name << '\n'
       << "highest ROC area: " << rows[best_roc].name << '\n';
  }
  return os.str();
}

std::string format_cdf_dump(const ScoreCdfs& c) {
  std::ostringstream os;
  os << "# score FG FB\n";
  char buf[128];
  for (Eigen::Index k = 0; k < c.orscore.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.10g %.10g %.10g\n", c.orscore[k], c.fg[k], c.fb[k]);
    os << buf;
  }
  return os.str();
}

}  // namespace scorecraft
