#include "scorecraft/qp.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace scorecraft {

namespace {

using nlohmann::json;

json to_json(const Vector& v, bool infinite_as_null = false) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (infinite_as_null && std::isinf(v[i])) a.push_back(nullptr);
    else a.push_back(v[i]);
  }
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}

Vector vector_from(const json& j, const char* what, double null_value = std::nan("")) {
  if (!j.is_array()) throw ValidationError(std::string("qp dump: '") + what + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_null() && !std::isnan(null_value)) v[static_cast<Eigen::Index>(i)] = null_value;
    else if (j[i].is_number()) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    else throw ValidationError(std::string("qp dump: non-numeric entry in '") + what + "'");
  }
  return v;
}

Matrix matrix_from(const json& j, const char* what, Eigen::Index cols) {
  if (!j.is_array()) throw ValidationError(std::string("qp dump: '") + what + "' must be an array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from(j[r], what);
    require_size(what, row.size(), cols);
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace

std::string write_qp_dump(const QpProblem& p) {
  json j;
  j["format"] = "scorecraft-qp";
  j["version"] = 1;
  j["q"] = p.q();
  j["H"] = to_json(p.h);
  j["f"] = to_json(p.f);
  j["Aeq"] = to_json(p.constraints.aeq);
  j["beq"] = to_json(p.constraints.beq);
  j["A"] = to_json(p.constraints.a);
  j["b"] = to_json(p.constraints.b);
  j["lower"] = to_json(p.lower, true);
  j["upper"] = to_json(p.upper, true);
  j["warm_start"] = p.warm_start ? to_json(*p.warm_start) : json(nullptr);
  return j.dump(1) + "\n";
}

QpProblem read_qp_dump(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("qp dump: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "scorecraft-qp") throw ValidationError("qp dump: not a scorecraft-qp file");
  if (j.value("version", 0) != 1) throw ValidationError("qp dump: unsupported version");
  try {
    const Vector f = vector_from(j.at("f"), "f");
    const auto q = f.size();
    ConstraintSet cs;
    cs.aeq = matrix_from(j.at("Aeq"), "Aeq", q);
    cs.beq = vector_from(j.at("beq"), "beq");
    cs.a = matrix_from(j.at("A"), "A", q);
    cs.b = vector_from(j.at("b"), "b");
    cs.eq_rows.assign(static_cast<std::size_t>(cs.aeq.rows()), RowProvenance{RowKind::fixed, {}});
    cs.ineq_rows.assign(static_cast<std::size_t>(cs.a.rows()), RowProvenance{RowKind::pattern, {}});
    std::optional<Vector> warm;
    if (j.contains("warm_start") && !j["warm_start"].is_null()) warm = vector_from(j["warm_start"], "warm_start");
    QpProblem p = QpProblem::make(matrix_from(j.at("H"), "H", q), f, std::move(cs), std::move(warm));
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (j.contains("lower")) p.lower = vector_from(j["lower"], "lower", -inf);
    if (j.contains("upper")) p.upper = vector_from(j["upper"], "upper", inf);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("qp dump: ") + e.what());
  }
}

}  // namespace scorecraft
