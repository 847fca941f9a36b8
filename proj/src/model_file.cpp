#include "scorecraft/io.hpp"

#include <json.hpp>

namespace scorecraft {

namespace {

using nlohmann::json;

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json kkt_json(const KktResiduals& k) {
  return {{"stationarity", k.stationarity},
          {"primal_eq", k.primal_eq},
          {"primal_ineq", k.primal_ineq},
          {"dual", k.dual},
          {"complementarity", k.complementarity}};
}

}  // namespace

std::string write_model(const ModelFile& m) {
  json j;
  j["format"] = "scorecraft-model";
  j["version"] = m.version;
  j["q"] = m.q();
  j["lambda"] = m.lambda;
  j["tol"] = m.tol;
  j["spec_hash"] = m.spec_hash;
  j["spec"] = m.spec_text;
  j["raw_columns"] = m.raw_columns;
  j["centering"] = m.centering;
  json iw = json::array();
  for (const auto& w : m.inweights) iw.push_back({{"coefficient", w.coefficient}, {"value", w.value}});
  j["inweights"] = iw;
  j["beta"] = vec(m.fit.beta);
  j["status"] = fit_status_name(m.fit.status);
  json traj = json::array();
  for (const auto& r : m.fit.trajectory) {
    traj.push_back({{"iteration", r.iteration},
                    {"max_delta", r.max_delta},
                    {"minus_ll", r.minus_ll},
                    {"objective", r.objective},
                    {"qp_iterations", r.qp_iterations}});
  }
  j["trajectory"] = traj;
  j["residuals"] = {{"eq", m.fit.constraint_residuals.eq},
                    {"ineq", m.fit.constraint_residuals.ineq},
                    {"kkt", kkt_json(m.fit.kkt)}};
  j["minus_ll"] = m.fit.minus_ll;
  j["warnings"] = m.fit.warnings;
  return j.dump(2) + "\n";
}

ModelFile parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "scorecraft-model") throw ValidationError("model file: not a scorecraft model");
  const int version = j.value("version", 0);
  if (version != ModelFile::kVersion) {
    throw ValidationError("model file: unsupported version " + std::to_string(version));
  }
  try {
    ModelFile m;
    m.version = version;
    m.lambda = j.at("lambda").get<double>();
    m.tol = j.value("tol", 1e-6);
    m.spec_hash = j.value("spec_hash", "");
    m.spec_text = j.value("spec", "");
    m.raw_columns = j.value("raw_columns", std::vector<std::string>{});
    m.centering = j.value("centering", "none");
    for (const auto& w : j.value("inweights", json::array())) {
      m.inweights.push_back({w.at("coefficient").get<int>(), w.at("value").get<double>()});
    }
    m.fit.beta = vec_from(j.at("beta"));
    if (m.fit.beta.size() != j.at("q").get<Eigen::Index>()) throw ValidationError("model file: q does not match beta");
    m.fit.status = j.value("status", "") == "converged" ? FitStatus::converged : FitStatus::max_iterations;
    for (const auto& r : j.value("trajectory", json::array())) {
      IterationRecord rec;
      rec.iteration = r.at("iteration").get<int>();
      rec.max_delta = r.at("max_delta").get<double>();
      rec.minus_ll = r.at("minus_ll").get<double>();
      rec.objective = r.value("objective", rec.minus_ll);
      rec.qp_iterations = r.value("qp_iterations", 0);
      m.fit.trajectory.push_back(rec);
    }
    if (j.contains("residuals")) {
      const auto& r = j["residuals"];
      m.fit.constraint_residuals.eq = r.value("eq", 0.0);
      m.fit.constraint_residuals.ineq = r.value("ineq", 0.0);
      if (r.contains("kkt")) {
        const auto& k = r["kkt"];
        m.fit.kkt.stationarity = k.value("stationarity", 0.0);
        m.fit.kkt.primal_eq = k.value("primal_eq", 0.0);
        m.fit.kkt.primal_ineq = k.value("primal_ineq", 0.0);
        m.fit.kkt.dual = k.value("dual", 0.0);
        m.fit.kkt.complementarity = k.value("complementarity", 0.0);
      }
    }
    m.fit.minus_ll = j.value("minus_ll", 0.0);
    m.fit.warnings = j.value("warnings", std::vector<std::string>{});
    if (!m.spec_text.empty()) {
      const auto spec = parse_spec(m.spec_text);
      if (spec.q() != m.q()) throw ValidationError("model file: embedded spec has q != length of beta");
      if (!m.spec_hash.empty() && spec_hash(spec) != m.spec_hash) {
        throw ValidationError("model file: spec hash does not match the embedded spec");
      }
    } else if (static_cast<Eigen::Index>(m.raw_columns.size()) + 1 != m.q()) {
      throw ValidationError("model file: raw design needs q - 1 column names");
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

}  // namespace scorecraft
