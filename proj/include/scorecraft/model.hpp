#pragma once

#include "scorecraft/types.hpp"

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scorecraft {

enum class BinKind { special, interval, category, noinfo };

/// How a raw characteristic value is assigned to an attribute.
///
/// Intervals are half-open, lo <= v < hi; either end may be infinite.
/// Special matches one exact numeric sentinel. Category matches the cell
/// text against a label set.
struct BinRule {
  BinKind kind = BinKind::noinfo;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double value = 0.0;
  std::vector<std::string> categories;

  static BinRule special(double value);
  static BinRule interval(double lo, double hi);
  static BinRule category(std::vector<std::string> labels);
  static BinRule no_information();

  bool operator==(const BinRule&) const = default;
};

enum class TermOp {
  fixed_to,      // "= v"
  greater_than,  // "> k"
  less_than,     // "< k"
  tied_to,       // "~ k": cross/group restriction S_a = S_k
};

struct ConstraintTerm {
  TermOp op = TermOp::fixed_to;
  double value = 0.0;  // fixed_to only
  int att = 0;         // referenced attribute for the ordering/tie ops

  bool operator==(const ConstraintTerm&) const = default;
};

/// Conjunction of terms; empty means the attribute is unconstrained.
struct ConstraintTag {
  std::vector<ConstraintTerm> terms;

  bool empty() const { return terms.empty(); }
  bool operator==(const ConstraintTag&) const = default;
};

/// Parses the constraint grammar `term ('&' term)*`. Blank text yields an
/// empty tag. Throws ValidationError on malformed input.
ConstraintTag parse_constraint_tag(std::string_view text);
std::string format_constraint_tag(const ConstraintTag& tag);

struct Attribute {
  int index = 0;  // 1-based global attribute number
  std::string label;
  BinRule bin;
  ConstraintTag tag;

  bool operator==(const Attribute&) const = default;
};

struct Characteristic {
  std::string name;
  std::vector<Attribute> attributes;

  /// Global index of the NoInformation attribute.
  int no_information_att() const;
  bool operator==(const Characteristic&) const = default;
};

class ScorecardSpec {
 public:
  ScorecardSpec() = default;
  /// Validates the characteristic list; throws ValidationError.
  explicit ScorecardSpec(std::vector<Characteristic> characteristics);

  const std::vector<Characteristic>& characteristics() const { return characteristics_; }
  /// Coefficient count: intercept plus one per attribute.
  int q() const { return q_; }
  int attribute_count() const { return q_ - 1; }
  const Attribute& attribute(int att) const;
  const Characteristic& characteristic_of(int att) const;
  const Characteristic* find(std::string_view name) const;

  bool operator==(const ScorecardSpec& other) const {
    return characteristics_ == other.characteristics_;
  }

 private:
  std::vector<Characteristic> characteristics_;
  std::vector<std::pair<int, int>> att_lookup_;  // att - 1 -> (char, position)
  int q_ = 1;
};

/// Parses the spec CSV dialect:
/// `char,att,label,kind,lo,hi,categories,constraint`, `#` comment lines.
/// Categories inside a cell are separated by `|`.
ScorecardSpec parse_spec(std::string_view text);
ScorecardSpec load_spec(const std::string& path);
/// Canonical serialization; parse_spec(write_spec(s)) == s.
std::string write_spec(const ScorecardSpec& spec);
/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string spec_hash(const ScorecardSpec& spec);

/// One raw cell from a data file. Empty text means missing.
struct RawValue {
  std::string text;
  std::optional<double> number;

  static RawValue missing() { return {}; }
  static RawValue of(double v);
  static RawValue parse(std::string_view cell);
  bool is_missing() const { return text.empty() && !number; }
};

/// Global attribute index for a raw value. Special and Category rules are
/// tried first in declared order, then Interval rules, and anything left
/// (including missing) lands on NoInformation.
int bin_value(const Characteristic& ch, const RawValue& raw);

/// Development sample. Outcome convention: y = 1 is Good, and the model
/// estimates Pr{y = 1}.
struct Sample {
  std::vector<std::string> columns;           // characteristic names
  Vector y;
  Vector w;
  std::vector<std::vector<RawValue>> records;  // records[i][column]

  Eigen::Index n() const { return y.size(); }
  /// Throws ValidationError if lengths, weights or outcomes are invalid.
  void validate() const;
};

/// n x q indicator design: column 0 is the intercept, then one 0/1 column
/// per attribute in att order.
Matrix build_design_matrix(const ScorecardSpec& spec, const Sample& sample);

/// Prepends an intercept column to externally supplied basis columns
/// (spline bases etc.). No indicator structure is assumed.
Matrix design_from_columns(const Matrix& columns);

Vector score_vector(const Matrix& design, const Vector& beta);

}  // namespace scorecraft
