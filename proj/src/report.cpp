#include "scorecraft/csv.hpp"
#include "scorecraft/io.hpp"

#include <cstdio>
#include <filesystem>
#include <map>

namespace scorecraft {

std::string format_weight(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

namespace {

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

RenderedReport render_report(const ScorecardSpec& spec, const std::vector<ReportColumn>& columns) {
  for (const auto& c : columns) require_size(("report column " + c.name).c_str(), c.beta.size(), spec.q());

  std::size_t w_char = 4, w_label = 9, w_tag = 10;
  for (const auto& ch : spec.characteristics()) {
    w_char = std::max(w_char, ch.name.size());
    for (const auto& a : ch.attributes) {
      w_label = std::max(w_label, a.label.size());
      w_tag = std::max(w_tag, format_constraint_tag(a.tag).size());
    }
  }
  std::vector<std::size_t> w_col;
  for (const auto& c : columns) w_col.push_back(std::max<std::size_t>(10, c.name.size()));

  RenderedReport out;
  std::string& t = out.text;
  t += pad("char", w_char) + "  " + pad("attribute", w_label) + "  " + pad("att#", 5, true) + "  " +
       pad("constraint", w_tag);
  for (std::size_t k = 0; k < columns.size(); ++k) t += "  " + pad(columns[k].name, w_col[k], true);
  t += '\n';

  std::string& c = out.csv;
  c += "char,att,label,constraint";
  for (const auto& col : columns) c += ',' + csv::escape(col.name);
  c += '\n';

  for (const auto& ch : spec.characteristics()) {
    for (const auto& a : ch.attributes) {
      const std::string tag = format_constraint_tag(a.tag);
      t += pad(ch.name, w_char) + "  " + pad(a.label, w_label) + "  " + pad(std::to_string(a.index), 5, true) +
           "  " + pad(tag, w_tag);
      c += csv::escape(ch.name) + ',' + std::to_string(a.index) + ',' + csv::escape(a.label) + ',' + csv::escape(tag);
      for (std::size_t k = 0; k < columns.size(); ++k) {
        t += "  " + pad(format_weight(columns[k].beta[a.index]), w_col[k], true);
        c += ',' + csv::format_double(columns[k].beta[a.index]);
      }
      t += '\n';
      c += '\n';
    }
  }

  const std::size_t lead = w_char + w_label + w_tag + 5 + 6;
  t += pad("intercept", lead);
  c += ",0,intercept,";
  for (std::size_t k = 0; k < columns.size(); ++k) {
    t += "  " + pad(format_weight(columns[k].beta[0]), w_col[k], true);
    c += ',' + csv::format_double(columns[k].beta[0]);
  }
  t += '\n';
  c += '\n';

  bool any_metrics = false;
  for (const auto& col : columns) any_metrics = any_metrics || col.metrics.has_value();
  if (any_metrics) {
    t += "\nmetrics\n";
    char buf[256];
    for (const auto& col : columns) {
      if (!col.metrics) continue;
      const auto& m = *col.metrics;
      std::snprintf(buf, sizeof(buf), "  %s: divergence %.4f  -log likelihood %.4f  KS %.4f  ROC area %.4f\n",
                    col.name.c_str(), m.divergence, m.minus_ll, m.ks, m.roc_area);
      t += buf;
    }
  }
  return out;
}

std::string report_twin_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.extension() == ".csv") return (p.parent_path() / (p.stem().string() + "_weights.csv")).string();
  p.replace_extension(".csv");
  return p.string();
}

void write_report(const ScorecardSpec& spec, const std::vector<ReportColumn>& columns, const std::string& path) {
  const RenderedReport r = render_report(spec, columns);
  csv::write_file_atomic(path, r.text);
  csv::write_file_atomic(report_twin_path(path), r.csv);
}

std::vector<ReportColumn> parse_report_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front().cells.size() < 4) throw ValidationError("report csv: missing header");
  const auto& header = rows.front().cells;
  std::vector<ReportColumn> cols;
  for (std::size_t k = 4; k < header.size(); ++k) cols.push_back({header[k], Vector::Zero(static_cast<Eigen::Index>(rows.size() - 1)), {}});
  Eigen::Index max_att = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r].cells;
    if (cells.size() != header.size()) throw ValidationError("report csv: ragged row");
    double att = 0.0;
    if (!csv::parse_double(cells[1], att)) throw ValidationError("report csv: bad att number");
    const auto idx = static_cast<Eigen::Index>(att);
    max_att = std::max(max_att, idx);
    for (std::size_t k = 4; k < cells.size(); ++k) {
      double v = 0.0;
      if (!csv::parse_double(cells[k], v)) throw ValidationError("report csv: bad weight");
      if (idx >= cols[k - 4].beta.size()) cols[k - 4].beta.conservativeResize(idx + 1);
      cols[k - 4].beta[idx] = v;
    }
  }
  for (auto& col : cols) col.beta.conservativeResize(max_att + 1);
  return cols;
}

}  // namespace scorecraft
