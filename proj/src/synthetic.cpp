#include "scorecraft/csv.hpp"
#include "scorecraft/io.hpp"
#include "scorecraft/kernels.hpp"

#include <json.hpp>

#include <cmath>

namespace scorecraft {

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t SampleRng::categorical(const std::vector<double>& probs) {
  const double u = uniform();
  double cum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    cum += probs[k];
    if (u < cum) return k;
  }
  // Rounding can leave cum slightly below 1; fall back to the last
  // category with positive probability.
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return k;
  }
  return probs.size() - 1;
}

SyntheticConfig SyntheticConfig::with_random_multinomials(const ScorecardSpec& spec, std::uint64_t seed, int n_good,
                                                          int n_bad) {
  SyntheticConfig cfg;
  cfg.seed = seed;
  cfg.n_good = n_good;
  cfg.n_bad = n_bad;
  cfg.spec = spec;
  SampleRng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const auto& ch : spec.characteristics()) {
    ClassMultinomials m;
    double sum_g = 0.0, sum_b = 0.0;
    for (const auto& a : ch.attributes) {
      const double base = a.bin.kind == BinKind::noinfo ? 0.2 : 0.5 + rng.uniform();
      const double tilt = 2.0 * rng.uniform() - 1.0;
      m.good.push_back(base * std::exp(0.5 * tilt));
      m.bad.push_back(base * std::exp(-0.5 * tilt));
      sum_g += m.good.back();
      sum_b += m.bad.back();
    }
    for (auto& v : m.good) v /= sum_g;
    for (auto& v : m.bad) v /= sum_b;
    cfg.probabilities.push_back(std::move(m));
  }
  return cfg;
}

void SyntheticConfig::validate() const {
  if (n_good < 0 || n_bad < 0 || n_good + n_bad < 1) throw ValidationError("synthetic: counts must be >= 0 with n >= 1");
  if (!true_weights && (n_good < 1 || n_bad < 1)) throw ValidationError("synthetic: n_good and n_bad must be >= 1");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ValidationError("synthetic: weight must be finite and >= 0");
  const auto& chars = spec.characteristics();
  if (probabilities.size() != chars.size()) {
    throw ValidationError("synthetic: need one multinomial pair per characteristic");
  }
  for (std::size_t c = 0; c < chars.size(); ++c) {
    for (const auto* probs : {&probabilities[c].good, &probabilities[c].bad}) {
      if (probs->size() != chars[c].attributes.size()) {
        throw ValidationError("synthetic: " + chars[c].name + " multinomial has wrong length");
      }
      double sum = 0.0;
      for (double p : *probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw ValidationError("synthetic: " + chars[c].name + " has a negative or non-finite probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("synthetic: " + chars[c].name + " multinomial sums to " + csv::format_double(sum));
      }
    }
  }
  if (true_weights) require_size("synthetic: true weights", true_weights->size(), spec.q());
}

RawValue representative_value(const Characteristic& ch, const Attribute& att) {
  std::vector<RawValue> candidates;
  const auto& bin = att.bin;
  switch (bin.kind) {
    case BinKind::noinfo: return RawValue::missing();
    case BinKind::special: candidates.push_back(RawValue::of(bin.value)); break;
    case BinKind::category:
      for (const auto& label : bin.categories) candidates.push_back(RawValue::parse(label));
      break;
    case BinKind::interval: {
      const bool lo_ok = std::isfinite(bin.lo);
      const bool hi_ok = std::isfinite(bin.hi);
      if (lo_ok) candidates.push_back(RawValue::of(bin.lo));
      if (lo_ok && hi_ok) candidates.push_back(RawValue::of(0.5 * (bin.lo + bin.hi)));
      if (hi_ok) candidates.push_back(RawValue::of(bin.hi - 1.0));
      if (lo_ok) candidates.push_back(RawValue::of(bin.lo + 1.0));
      if (!lo_ok && !hi_ok) candidates.push_back(RawValue::of(0.0));
      break;
    }
  }
  for (const auto& c : candidates) {
    if (bin_value(ch, c) == att.index) return c;
  }
  throw ValidationError("synthetic: attribute " + std::to_string(att.index) + " (" + att.label + ") of " + ch.name +
                        " is shadowed by earlier rules and cannot be generated");
}

SyntheticConfig parse_synthetic_config(const std::string& json_text, const ScorecardSpec& spec) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic config: ") + e.what());
  }
  try {
    const auto seed = j.value("seed", std::uint64_t{1});
    SyntheticConfig cfg =
        SyntheticConfig::with_random_multinomials(spec, seed, j.value("n_good", 1000), j.value("n_bad", 1000));
    cfg.weight = j.value("weight", 1.0);
    if (j.contains("characteristics")) {
      for (const auto& [name, probs] : j["characteristics"].items()) {
        const auto& chars = spec.characteristics();
        const auto it = std::find_if(chars.begin(), chars.end(), [&](const auto& ch) { return ch.name == name; });
        if (it == chars.end()) throw ValidationError("synthetic config: unknown characteristic '" + name + "'");
        auto& m = cfg.probabilities[static_cast<std::size_t>(it - chars.begin())];
        m.good = probs.at("good").get<std::vector<double>>();
        m.bad = probs.at("bad").get<std::vector<double>>();
      }
    }
    if (j.contains("true_weights")) {
      const auto tw = j["true_weights"].get<std::vector<double>>();
      cfg.true_weights = Eigen::Map<const Vector>(tw.data(), static_cast<Eigen::Index>(tw.size()));
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic config: ") + e.what());
  }
}

Sample gen_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const auto& chars = cfg.spec.characteristics();
  std::vector<std::vector<RawValue>> reps(chars.size());
  for (std::size_t c = 0; c < chars.size(); ++c) {
    for (std::size_t k = 0; k < chars[c].attributes.size(); ++k) {
      const auto& m = cfg.probabilities[c];
      const bool used = m.good[k] > 0.0 || (!cfg.true_weights && m.bad[k] > 0.0);
      reps[c].push_back(used ? representative_value(chars[c], chars[c].attributes[k]) : RawValue::missing());
    }
  }

  Sample s;
  for (const auto& ch : chars) s.columns.push_back(ch.name);
  const int n = cfg.n_good + cfg.n_bad;
  s.y.resize(n);
  s.w = Vector::Constant(n, cfg.weight);
  s.records.reserve(static_cast<std::size_t>(n));
  SampleRng rng(cfg.seed);
  for (int i = 0; i < n; ++i) {
    std::vector<RawValue> rec;
    rec.reserve(chars.size());
    if (cfg.true_weights) {
      double theta = (*cfg.true_weights)[0];
      for (std::size_t c = 0; c < chars.size(); ++c) {
        const auto k = rng.categorical(cfg.probabilities[c].good);
        rec.push_back(reps[c][k]);
        theta += (*cfg.true_weights)[chars[c].attributes[k].index];
      }
      s.y[i] = rng.uniform() < kernels::logistic(theta) ? 1.0 : 0.0;
    } else {
      const bool good = i < cfg.n_good;
      for (std::size_t c = 0; c < chars.size(); ++c) {
        const auto& probs = good ? cfg.probabilities[c].good : cfg.probabilities[c].bad;
        rec.push_back(reps[c][rng.categorical(probs)]);
      }
      s.y[i] = good ? 1.0 : 0.0;
    }
    s.records.push_back(std::move(rec));
  }
  return s;
}

}  // namespace scorecraft
