#include "qdyn1d/json_io.hpp"

#include <map>

namespace qdyn1d {

namespace {

const std::map<std::string, Family>& family_names() {
  static const std::map<std::string, Family> m = {
      {"substitution", Family::Substitution}, {"sturmian", Family::Sturmian},
      {"prime", Family::Prime},               {"sparse", Family::Sparse},
      {"hierarchical", Family::Hierarchical}, {"explicit", Family::Explicit},
  };
  return m;
}

std::string family_name(Family f) {
  for (const auto& [name, fam] : family_names())
    if (fam == f) return name;
  return "substitution";
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + where + it.key() + "'");
  }
}

SubstitutionRule rule_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "period-doubling") return period_doubling_rule();
    if (name == "fibonacci") return fibonacci_rule();
    if (name == "thue-morse") return thue_morse_rule();
    throw ConfigError("unknown named rule '" + name + "'");
  }
  check_keys(j, {"a", "b", "seed"}, "rule.");
  SubstitutionRule r;
  if (j.contains("a")) r.image_a = j.at("a").get<std::string>();
  if (j.contains("b")) r.image_b = j.at("b").get<std::string>();
  if (j.contains("seed")) {
    const std::string s = j.at("seed").get<std::string>();
    if (s.size() != 1) throw ConfigError("rule.seed must be a single symbol");
    r.seed = s[0];
  }
  return r;
}

RotationNumber omega_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "golden") return RotationNumber::golden_mean();
    if (name == "silver") return RotationNumber::silver_mean();
    throw ConfigError("unknown named rotation number '" + name + "'");
  }
  if (j.is_number()) return RotationNumber::decimal(j.get<double>());
  check_keys(j, {"surd", "decimal"}, "omega.");
  if (j.contains("surd")) {
    const auto& s = j.at("surd");
    if (!s.is_array() || s.size() != 3) throw ConfigError("omega.surd must be [d, p, q]");
    return RotationNumber::surd(s[0].get<std::int64_t>(), s[1].get<std::int64_t>(),
                                s[2].get<std::int64_t>());
  }
  if (j.contains("decimal")) return RotationNumber::decimal(j.at("decimal").get<double>());
  throw ConfigError("omega requires 'surd' or 'decimal'");
}

}  // namespace

nlohmann::json spec_to_json(const PotentialSpec& spec) {
  nlohmann::json j;
  j["family"] = family_name(spec.family);
  j["geometry"] = spec.geometry == Geometry::HalfLine ? "half-line" : "whole-line";
  j["level_a"] = spec.level_a;
  j["level_b"] = spec.level_b;
  j["coupling"] = spec.coupling;
  j["max_window"] = spec.max_window;
  switch (spec.family) {
    case Family::Substitution:
      j["rule"] = {{"a", spec.rule.image_a}, {"b", spec.rule.image_b},
                   {"seed", std::string(1, spec.rule.seed)}};
      break;
    case Family::Sturmian:
      if (spec.omega.is_surd)
        j["omega"] = {{"surd", {spec.omega.d, spec.omega.p, spec.omega.q}}};
      else
        j["omega"] = {{"decimal", spec.omega.approx}};
      j["theta"] = spec.theta;
      break;
    case Family::Sparse:
      j["gamma"] = spec.gamma;
      break;
    case Family::Hierarchical:
      j["ratio"] = spec.ratio;
      j["v_origin"] = spec.v_origin;
      break;
    case Family::Explicit:
      j["explicit_values"] = spec.explicit_values;
      j["explicit_lo"] = spec.explicit_lo;
      break;
    case Family::Prime:
      break;
  }
  return j;
}

PotentialSpec spec_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"family", "geometry", "level_a", "level_b", "coupling", "rule", "omega", "theta",
              "gamma", "ratio", "v_origin", "explicit_values", "explicit_lo", "max_window"},
             "potential.");
  PotentialSpec spec;
  if (j.contains("family")) {
    const std::string f = j.at("family").get<std::string>();
    const auto it = family_names().find(f);
    if (it == family_names().end()) throw ConfigError("unknown family '" + f + "'");
    spec.family = it->second;
  }
  if (j.contains("geometry")) {
    const std::string g = j.at("geometry").get<std::string>();
    if (g == "half-line")
      spec.geometry = Geometry::HalfLine;
    else if (g == "whole-line")
      spec.geometry = Geometry::WholeLine;
    else
      throw ConfigError("unknown geometry '" + g + "'");
  }
  if (j.contains("level_a")) spec.level_a = j.at("level_a").get<double>();
  if (j.contains("level_b")) spec.level_b = j.at("level_b").get<double>();
  if (j.contains("coupling")) spec.coupling = j.at("coupling").get<double>();
  if (j.contains("rule")) spec.rule = rule_from_json(j.at("rule"));
  if (j.contains("omega")) spec.omega = omega_from_json(j.at("omega"));
  if (j.contains("theta")) spec.theta = j.at("theta").get<double>();
  if (j.contains("gamma")) spec.gamma = j.at("gamma").get<int>();
  if (j.contains("ratio")) spec.ratio = j.at("ratio").get<double>();
  if (j.contains("v_origin")) spec.v_origin = j.at("v_origin").get<double>();
  if (j.contains("explicit_values"))
    spec.explicit_values = j.at("explicit_values").get<std::vector<double>>();
  if (j.contains("explicit_lo")) spec.explicit_lo = j.at("explicit_lo").get<index_t>();
  if (j.contains("max_window")) spec.max_window = j.at("max_window").get<index_t>();
  return spec;
}

}  // namespace qdyn1d
