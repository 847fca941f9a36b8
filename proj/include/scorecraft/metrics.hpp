#pragma once

#include "scorecraft/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace scorecraft {

/// Good/Bad empirical CDFs after stably sorting records by ascending score.
/// y = 1 is Good. fg[i], fb[i] are the CDFs after the i-th sorted record.
struct ScoreCdfs {
  Vector orscore;
  Vector fg;
  Vector fb;
};

ScoreCdfs scorecdfs(const Vector& score, const Vector& y, const Vector& w);

struct RocStats {
  double ks = 0.0;        // max(fb - fg)
  double roc_area = 0.0;  // trapezoidal area of fb against fg
};

RocStats roc(const Vector& score, const Vector& y, const Vector& w);

enum class VarianceKind { population, sample };

/// (muG - muB)^2 / ((varG + varB) / 2) with weighted class moments.
double divergence(const Vector& score, const Vector& y, const Vector& w,
                  VarianceKind kind = VarianceKind::population);

/// Minus log likelihood of a score used directly as the log odds.
double score_minus_ll(const Vector& score, const Vector& y, const Vector& w);

struct ScoreMetrics {
  double ks = 0.0;
  double roc_area = 0.0;
  double divergence = 0.0;
  double minus_ll = 0.0;
};

ScoreMetrics evaluate_score(const Vector& score, const Vector& y, const Vector& w,
                            VarianceKind kind = VarianceKind::population);

struct ComparisonRow {
  std::string name;
  ScoreMetrics metrics;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  // Row index that wins each measure (higher divergence/KS/ROC, lower -LL).
  std::size_t best_divergence = 0;
  std::size_t best_minus_ll = 0;
  std::size_t best_ks = 0;
  std::size_t best_roc = 0;

  std::string format() const;
};

ComparisonTable compare_scores(const std::vector<std::pair<std::string, Vector>>& scores, const Vector& y,
                               const Vector& w);

/// Whitespace-separated columns `score fg fb`, one sorted record per line.
std::string format_cdf_dump(const ScoreCdfs& cdfs);

}  // namespace scorecraft
