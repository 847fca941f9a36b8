#include "scorecraft/csv.hpp"
#include "scorecraft/io.hpp"

#include <cmath>

namespace scorecraft {

namespace {

void check_header(const std::vector<csv::Row>& rows, const std::string& source) {
  if (rows.empty()) throw ValidationError(source + ": empty file");
  const auto& h = rows.front().cells;
  if (h.size() < 2 || csv::trim(h[0]) != "y" || csv::trim(h[1]) != "w") {
    throw ValidationError(source + ": header must start with y,w");
  }
}

void parse_outcome(const csv::Row& row, std::size_t data_row, const std::string& source, double& y, double& w) {
  const std::string where = source + " row " + std::to_string(data_row) + " (line " + std::to_string(row.line) + ")";
  const std::string yt = csv::trim(row.cells[0]);
  if (yt == "0") y = 0.0;
  else if (yt == "1") y = 1.0;
  else throw ValidationError(where + ", column y: outcome must be 0 or 1, got '" + yt + "'");
  const std::string wt = csv::trim(row.cells[1]);
  if (wt.empty()) throw ValidationError(where + ", column w: weight is required");
  if (!csv::parse_double(wt, w) || !std::isfinite(w)) {
    throw ValidationError(where + ", column w: weight '" + wt + "' is not a finite number");
  }
  if (w < 0.0) throw ValidationError(where + ", column w: weight must be >= 0");
}

}  // namespace

Sample parse_sample(const std::string& text, const std::string& source) {
  const auto rows = csv::parse(text);
  check_header(rows, source);
  Sample s;
  const auto& header = rows.front().cells;
  for (std::size_t c = 2; c < header.size(); ++c) s.columns.push_back(csv::trim(header[c]));
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  s.y.resize(n);
  s.w.resize(n);
  s.records.reserve(static_cast<std::size_t>(n));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.size()) {
      throw ValidationError(source + " line " + std::to_string(row.line) + ": expected " +
                            std::to_string(header.size()) + " cells, got " + std::to_string(row.cells.size()));
    }
    const auto i = static_cast<Eigen::Index>(r - 1);
    parse_outcome(row, r, source, s.y[i], s.w[i]);
    std::vector<RawValue> rec;
    rec.reserve(s.columns.size());
    for (std::size_t c = 2; c < row.cells.size(); ++c) rec.push_back(RawValue::parse(row.cells[c]));
    s.records.push_back(std::move(rec));
  }
  return s;
}

Sample load_sample(const std::string& path) { return parse_sample(csv::read_file(path), path); }

std::string write_sample(const Sample& s) {
  s.validate();
  std::string out = "y,w";
  for (const auto& c : s.columns) out += ',' + csv::escape(c);
  out += '\n';
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    out += s.y[i] == 1.0 ? '1' : '0';
    out += ',' + csv::format_double(s.w[i]);
    for (const auto& v : s.records[static_cast<std::size_t>(i)]) out += ',' + csv::escape(v.text);
    out += '\n';
  }
  return out;
}

NumericSample parse_numeric_sample(const std::string& text, const std::string& source) {
  const auto rows = csv::parse(text);
  check_header(rows, source);
  NumericSample s;
  const auto& header = rows.front().cells;
  for (std::size_t c = 2; c < header.size(); ++c) s.columns.push_back(csv::trim(header[c]));
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  const auto k = static_cast<Eigen::Index>(s.columns.size());
  s.y.resize(n);
  s.w.resize(n);
  s.values.resize(n, k);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.size()) {
      throw ValidationError(source + " line " + std::to_string(row.line) + ": wrong number of cells");
    }
    const auto i = static_cast<Eigen::Index>(r - 1);
    parse_outcome(row, r, source, s.y[i], s.w[i]);
    for (Eigen::Index c = 0; c < k; ++c) {
      double v = 0.0;
      const auto& cell = row.cells[static_cast<std::size_t>(c + 2)];
      if (!csv::parse_double(cell, v) || !std::isfinite(v)) {
        throw ValidationError(source + " row " + std::to_string(r) + ", column " +
                              s.columns[static_cast<std::size_t>(c)] + ": numeric value required");
      }
      s.values(i, c) = v;
    }
  }
  return s;
}

Vector load_score_file(const std::string& path) {
  const auto rows = csv::parse(csv::read_file(path));
  if (rows.empty() || rows.front().cells.size() != 1 || csv::trim(rows.front().cells[0]) != "score") {
    throw ValidationError(path + ": score file needs a single column with header 'score'");
  }
  Vector s(static_cast<Eigen::Index>(rows.size() - 1));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    double v = 0.0;
    if (rows[r].cells.size() != 1 || !csv::parse_double(rows[r].cells[0], v) || !std::isfinite(v)) {
      throw ValidationError(path + " line " + std::to_string(rows[r].line) + ": bad score value");
    }
    s[static_cast<Eigen::Index>(r - 1)] = v;
  }
  return s;
}

}  // namespace scorecraft
