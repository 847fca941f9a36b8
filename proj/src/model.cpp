#include "scorecraft/model.hpp"

#include "scorecraft/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>

namespace scorecraft {

void require_size(const char* what, Eigen::Index actual, Eigen::Index expected) {
  if (actual != expected) {
    throw ValidationError(std::string(what) + ": dimension mismatch (got " + std::to_string(actual) +
                          ", expected " + std::to_string(expected) + ")");
  }
}

BinRule BinRule::special(double value) {
  BinRule r;
  r.kind = BinKind::special;
  r.value = value;
  return r;
}

BinRule BinRule::interval(double lo, double hi) {
  BinRule r;
  r.kind = BinKind::interval;
  r.lo = lo;
  r.hi = hi;
  return r;
}

BinRule BinRule::category(std::vector<std::string> labels) {
  BinRule r;
  r.kind = BinKind::category;
  r.categories = std::move(labels);
  return r;
}

BinRule BinRule::no_information() { return BinRule{}; }

namespace {

constexpr const char* kHeader[] = {"char", "att",        "label",     "kind",
                                   "lo",   "hi",         "categories", "constraint"};

const char* kind_name(BinKind k) {
  switch (k) {
    case BinKind::special: return "special";
    case BinKind::interval: return "interval";
    case BinKind::category: return "category";
    case BinKind::noinfo: return "noinfo";
  }
  return "?";
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(csv::trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view text, int& out) {
  double v = 0.0;
  if (!csv::parse_double(text, v) || !std::isfinite(v) || v != std::floor(v) ||
      std::abs(v) > 1e9) {
    return false;
  }
  out = static_cast<int>(v);
  return true;
}

}  // namespace

ConstraintTag parse_constraint_tag(std::string_view text) {
  ConstraintTag tag;
  if (csv::trim(text).empty()) return tag;
  for (const std::string& part : split(text, '&')) {
    if (part.empty()) throw ValidationError("constraint: empty term in '" + std::string(text) + "'");
    ConstraintTerm term;
    const std::string operand = csv::trim(std::string_view(part).substr(1));
    switch (part[0]) {
      case '=': {
        term.op = TermOp::fixed_to;
        if (!csv::parse_double(operand, term.value) || !std::isfinite(term.value)) {
          throw ValidationError("constraint: '= ' needs a finite number in '" + part + "'");
        }
        break;
      }
      case '>': term.op = TermOp::greater_than; break;
      case '<': term.op = TermOp::less_than; break;
      case '~': term.op = TermOp::tied_to; break;
      default:
        throw ValidationError("constraint: unknown operator in term '" + part + "'");
    }
    if (term.op != TermOp::fixed_to) {
      if (!parse_int(operand, term.att) || term.att < 1) {
        throw ValidationError("constraint: expected attribute number in term '" + part + "'");
      }
    }
    tag.terms.push_back(term);
  }
  return tag;
}

std::string format_constraint_tag(const ConstraintTag& tag) {
  std::string out;
  for (const auto& t : tag.terms) {
    if (!out.empty()) out += " & ";
    switch (t.op) {
      case TermOp::fixed_to: out += "= " + csv::format_double(t.value); break;
      case TermOp::greater_than: out += "> " + std::to_string(t.att); break;
      case TermOp::less_than: out += "< " + std::to_string(t.att); break;
      case TermOp::tied_to: out += "~ " + std::to_string(t.att); break;
    }
  }
  return out;
}

int Characteristic::no_information_att() const {
  for (const auto& a : attributes) {
    if (a.bin.kind == BinKind::noinfo) return a.index;
  }
  throw ValidationError("characteristic " + name + " has no NoInformation attribute");
}

ScorecardSpec::ScorecardSpec(std::vector<Characteristic> characteristics)
    : characteristics_(std::move(characteristics)) {
  std::set<std::string> names;
  int expected = 1;
  for (std::size_t c = 0; c < characteristics_.size(); ++c) {
    const auto& ch = characteristics_[c];
    if (ch.name.empty()) throw ValidationError("spec: characteristic with empty name");
    if (!names.insert(ch.name).second) {
      throw ValidationError("spec: characteristic '" + ch.name + "' appears in two separate blocks");
    }
    if (ch.attributes.size() < 2) {
      throw ValidationError("spec: characteristic '" + ch.name + "' needs at least two attributes");
    }
    int noinfo = 0;
    for (std::size_t k = 0; k < ch.attributes.size(); ++k) {
      const auto& a = ch.attributes[k];
      if (a.index < expected) {
        throw ValidationError("spec: duplicate att_index " + std::to_string(a.index));
      }
      if (a.index != expected) {
        throw ValidationError("spec: att_index " + std::to_string(a.index) + " out of sequence (expected " +
                              std::to_string(expected) + ")");
      }
      ++expected;
      const auto& bin = a.bin;
      switch (bin.kind) {
        case BinKind::interval:
          if (!(bin.lo < bin.hi)) {
            throw ValidationError("spec: attribute " + std::to_string(a.index) + " interval needs lo < hi");
          }
          break;
        case BinKind::special:
          if (!std::isfinite(bin.value)) {
            throw ValidationError("spec: attribute " + std::to_string(a.index) + " special value must be finite");
          }
          break;
        case BinKind::category:
          if (bin.categories.empty()) {
            throw ValidationError("spec: attribute " + std::to_string(a.index) + " has no category labels");
          }
          break;
        case BinKind::noinfo:
          ++noinfo;
          break;
      }
      att_lookup_.emplace_back(static_cast<int>(c), static_cast<int>(k));
    }
    if (noinfo != 1) {
      throw ValidationError("spec: characteristic '" + ch.name + "' must have exactly one noinfo attribute");
    }
  }
  q_ = expected;
  if (q_ < 2) throw ValidationError("spec: no attributes");
  for (const auto& ch : characteristics_) {
    for (const auto& a : ch.attributes) {
      for (const auto& t : a.tag.terms) {
        if (t.op == TermOp::fixed_to) continue;
        if (t.att < 1 || t.att >= q_) {
          throw ValidationError("spec: attribute " + std::to_string(a.index) + " tag references missing attribute " +
                                std::to_string(t.att));
        }
        if (t.att == a.index) {
          throw ValidationError("spec: attribute " + std::to_string(a.index) + " tag references itself");
        }
      }
    }
  }
}

const Attribute& ScorecardSpec::attribute(int att) const {
  if (att < 1 || att >= q_) throw ValidationError("spec: no attribute " + std::to_string(att));
  const auto [c, k] = att_lookup_[static_cast<std::size_t>(att - 1)];
  return characteristics_[static_cast<std::size_t>(c)].attributes[static_cast<std::size_t>(k)];
}

const Characteristic& ScorecardSpec::characteristic_of(int att) const {
  if (att < 1 || att >= q_) throw ValidationError("spec: no attribute " + std::to_string(att));
  return characteristics_[static_cast<std::size_t>(att_lookup_[static_cast<std::size_t>(att - 1)].first)];
}

const Characteristic* ScorecardSpec::find(std::string_view name) const {
  for (const auto& ch : characteristics_) {
    if (ch.name == name) return &ch;
  }
  return nullptr;
}

ScorecardSpec parse_spec(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ValidationError("spec: empty file");
  const auto& header = rows.front();
  bool header_ok = header.cells.size() == std::size(kHeader);
  for (std::size_t i = 0; header_ok && i < std::size(kHeader); ++i) {
    header_ok = csv::trim(header.cells[i]) == kHeader[i];
  }
  if (!header_ok) {
    throw ValidationError("spec: header must be char,att,label,kind,lo,hi,categories,constraint");
  }

  std::vector<Characteristic> chars;
  std::set<int> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "spec line " + std::to_string(row.line) + ": ";
    if (row.cells.size() != std::size(kHeader)) {
      throw ValidationError(where + "expected 8 cells, got " + std::to_string(row.cells.size()));
    }
    const std::string name = csv::trim(row.cells[0]);
    Attribute att;
    if (!parse_int(row.cells[1], att.index)) throw ValidationError(where + "bad att number");
    if (!seen.insert(att.index).second) {
      throw ValidationError(where + "duplicate att_index " + std::to_string(att.index));
    }
    att.label = csv::trim(row.cells[2]);
    const std::string kind = csv::trim(row.cells[3]);
    const std::string lo_text = csv::trim(row.cells[4]);
    const std::string hi_text = csv::trim(row.cells[5]);
    auto number = [&](const std::string& t, double fallback) {
      if (t.empty()) return fallback;
      double v = 0.0;
      if (!csv::parse_double(t, v)) throw ValidationError(where + "bad number '" + t + "'");
      return v;
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (kind == "special") {
      if (lo_text.empty()) throw ValidationError(where + "special bin needs its value in the lo column");
      att.bin = BinRule::special(number(lo_text, 0.0));
    } else if (kind == "interval") {
      att.bin = BinRule::interval(number(lo_text, -inf), number(hi_text, inf));
      if (!(att.bin.lo < att.bin.hi)) throw ValidationError(where + "interval with lo >= hi");
    } else if (kind == "category") {
      std::vector<std::string> labels;
      for (auto& l : split(row.cells[6], '|')) {
        if (!l.empty()) labels.push_back(std::move(l));
      }
      att.bin = BinRule::category(std::move(labels));
    } else if (kind == "noinfo") {
      att.bin = BinRule::no_information();
    } else {
      throw ValidationError(where + "unknown kind '" + kind + "'");
    }
    try {
      att.tag = parse_constraint_tag(row.cells[7]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (chars.empty() || chars.back().name != name) chars.push_back(Characteristic{name, {}});
    chars.back().attributes.push_back(std::move(att));
  }
  return ScorecardSpec(std::move(chars));
}

ScorecardSpec load_spec(const std::string& path) { return parse_spec(csv::read_file(path)); }

std::string write_spec(const ScorecardSpec& spec) {
  std::string out = "char,att,label,kind,lo,hi,categories,constraint\n";
  auto finite_or_empty = [](double v) { return std::isinf(v) ? std::string() : csv::format_double(v); };
  for (const auto& ch : spec.characteristics()) {
    for (const auto& a : ch.attributes) {
      std::string lo, hi, cats;
      switch (a.bin.kind) {
        case BinKind::special: lo = csv::format_double(a.bin.value); break;
        case BinKind::interval:
          lo = finite_or_empty(a.bin.lo);
          hi = finite_or_empty(a.bin.hi);
          break;
        case BinKind::category:
          for (const auto& c : a.bin.categories) cats += (cats.empty() ? "" : "|") + c;
          break;
        case BinKind::noinfo: break;
      }
      out += csv::escape(ch.name) + ',' + std::to_string(a.index) + ',' + csv::escape(a.label) + ',' +
             kind_name(a.bin.kind) + ',' + lo + ',' + hi + ',' + csv::escape(cats) + ',' +
             csv::escape(format_constraint_tag(a.tag)) + '\n';
    }
  }
  return out;
}

std::string spec_hash(const ScorecardSpec& spec) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : write_spec(spec)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RawValue RawValue::of(double v) { return RawValue{csv::format_double(v), v}; }

RawValue RawValue::parse(std::string_view cell) {
  RawValue r;
  r.text = csv::trim(cell);
  double v = 0.0;
  if (!r.text.empty() && csv::parse_double(r.text, v)) r.number = v;
  return r;
}

int bin_value(const Characteristic& ch, const RawValue& raw) {
  if (!raw.is_missing()) {
    for (const auto& a : ch.attributes) {
      const auto& bin = a.bin;
      if (bin.kind == BinKind::special && raw.number && *raw.number == bin.value) return a.index;
      if (bin.kind == BinKind::category &&
          std::find(bin.categories.begin(), bin.categories.end(), raw.text) != bin.categories.end()) {
        return a.index;
      }
    }
    if (raw.number) {
      const double v = *raw.number;
      for (const auto& a : ch.attributes) {
        if (a.bin.kind == BinKind::interval && a.bin.lo <= v && v < a.bin.hi) return a.index;
      }
    }
  }
  return ch.no_information_att();
}

void Sample::validate() const {
  const auto n = y.size();
  require_size("sample weights", w.size(), n);
  require_size("sample records", static_cast<Eigen::Index>(records.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw ValidationError("sample row " + std::to_string(i + 1) + ": y must be 0 or 1");
    }
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      throw ValidationError("sample row " + std::to_string(i + 1) + ": weight must be finite and >= 0");
    }
    if (records[static_cast<std::size_t>(i)].size() != columns.size()) {
      throw ValidationError("sample row " + std::to_string(i + 1) + ": wrong number of cells");
    }
  }
}

Matrix build_design_matrix(const ScorecardSpec& spec, const Sample& sample) {
  sample.validate();
  const auto& chars = spec.characteristics();
  std::vector<std::size_t> column_of(chars.size());
  for (const auto& name : sample.columns) {
    if (!spec.find(name)) throw ValidationError("data refers to unknown characteristic '" + name + "'");
  }
  for (std::size_t c = 0; c < chars.size(); ++c) {
    const auto it = std::find(sample.columns.begin(), sample.columns.end(), chars[c].name);
    if (it == sample.columns.end()) {
      throw ValidationError("data has no column for characteristic '" + chars[c].name + "'");
    }
    column_of[c] = static_cast<std::size_t>(it - sample.columns.begin());
  }
  Matrix x = Matrix::Zero(sample.n(), spec.q());
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    const auto& rec = sample.records[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    for (std::size_t c = 0; c < chars.size(); ++c) {
      x(i, bin_value(chars[c], rec[column_of[c]])) = 1.0;
    }
  }
  return x;
}

Matrix design_from_columns(const Matrix& columns) {
  Matrix x(columns.rows(), columns.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(columns.cols()) = columns;
  return x;
}

Vector score_vector(const Matrix& design, const Vector& beta) {
  require_size("score_vector beta", beta.size(), design.cols());
  return design * beta;
}

}  // namespace scorecraft
