#pragma once

#include "scorecraft/metrics.hpp"
#include "scorecraft/model.hpp"
#include "scorecraft/sqp.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace scorecraft {

// ---- data files ------------------------------------------------------------

/// Reads a data CSV with header `y,w,<char>...`. Empty characteristic cells
/// are missing values; y and w are required in every row.
Sample load_sample(const std::string& path);
Sample parse_sample(const std::string& text, const std::string& source = "data");
std::string write_sample(const Sample& sample);

/// Raw-matrix ingestion: every column after y,w is a numeric basis column.
struct NumericSample {
  std::vector<std::string> columns;
  Vector y;
  Vector w;
  Matrix values;  // n x columns, no intercept
};
NumericSample parse_numeric_sample(const std::string& text, const std::string& source = "data");

/// Reads a one-column score file with header `score`.
Vector load_score_file(const std::string& path);

// ---- synthetic data --------------------------------------------------------

/// Class-conditional attribute probabilities for one characteristic.
struct ClassMultinomials {
  std::vector<double> good;
  std::vector<double> bad;
};

struct SyntheticConfig {
  std::uint64_t seed = 1;
  int n_good = 1000;
  int n_bad = 1000;
  double weight = 1.0;
  ScorecardSpec spec;
  std::vector<ClassMultinomials> probabilities;  // one per characteristic, spec order
  /// When set, attributes are drawn from the `good` multinomials as the
  /// population mix and y ~ Bernoulli(logistic(x'true_weights)) for
  /// n_good + n_bad records; the class counts are then not fixed.
  std::optional<Vector> true_weights;

  /// Seeded random multinomials: each attribute gets a base frequency and a
  /// log-odds tilt shared out between the classes.
  static SyntheticConfig with_random_multinomials(const ScorecardSpec& spec, std::uint64_t seed, int n_good,
                                                  int n_bad);
  void validate() const;
};

/// Reads {"seed", "n_good", "n_bad", "weight", "characteristics": {name:
/// {"good": [...], "bad": [...]}}}; characteristics not listed get seeded
/// random multinomials.
SyntheticConfig parse_synthetic_config(const std::string& json_text, const ScorecardSpec& spec);

/// Deterministic given the config: the same seed gives the same sample.
Sample gen_synthetic(const SyntheticConfig& config);

/// A raw cell value that bins to `att`; throws ValidationError when an
/// earlier rule shadows the attribute entirely.
RawValue representative_value(const Characteristic& ch, const Attribute& att);

/// mt19937_64 with a fixed 53-bit uniform mapping and inverse-CDF
/// categorical draws, so sequences are identical on every platform.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  std::size_t categorical(const std::vector<double>& probs);

 private:
  std::mt19937_64 engine_;
};

// ---- model files -----------------------------------------------------------

struct ModelFile {
  static constexpr int kVersion = 1;
  int version = kVersion;
  double lambda = 0.0;
  double tol = 1e-6;
  std::string spec_hash;
  std::string spec_text;             // canonical spec; empty for raw designs
  std::vector<std::string> raw_columns;
  std::string centering = "none";
  std::vector<InWeight> inweights;
  FitResult fit;

  Eigen::Index q() const { return fit.beta.size(); }
  bool raw_design() const { return spec_text.empty(); }
};

std::string write_model(const ModelFile& model);
ModelFile parse_model(const std::string& text);

// ---- reports ---------------------------------------------------------------

struct ReportColumn {
  std::string name;
  Vector beta;
  std::optional<ScoreMetrics> metrics;
};

struct RenderedReport {
  std::string text;
  std::string csv;
};

/// Per-attribute weight table (4 decimals) with the intercept on its own
/// line and a metrics footer; the CSV twin carries full precision.
RenderedReport render_report(const ScorecardSpec& spec, const std::vector<ReportColumn>& columns);
/// Writes the text report to `path` and the CSV twin to report_twin_path(path).
void write_report(const ScorecardSpec& spec, const std::vector<ReportColumn>& columns, const std::string& path);
std::string report_twin_path(const std::string& path);
/// Weight columns parsed back from a CSV twin, by model name.
std::vector<ReportColumn> parse_report_csv(const std::string& text);

/// Fixed 4-decimal rendering; values that round to zero print as 0.0000.
std::string format_weight(double v);

}  // namespace scorecraft
