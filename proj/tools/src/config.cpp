#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "quditfuse/graphstate.hpp"
#include "quditfuse/unitary_io.hpp"
#include "quditfuse_cli/cli.hpp"

namespace quditfuse::cli {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
  return get<T>(j, key, where, T{});
}

CVector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (e.is_number()) {
      v(static_cast<Eigen::Index>(i)) = e.get<double>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      v(static_cast<Eigen::Index>(i)) = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ConfigError(where + "[" + std::to_string(i) + "] must be a number or an [re, im] pair");
    }
  }
  return v;
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"d", "clusters", "ancillas", "vacuum_pads", "unitary", "seed", "trials", "objective", "optimizer",
                 "tradeoff"},
             "scenario");
  ScenarioConfig c;
  c.d = require<int>(j, "d", "scenario");
  if (c.d < 2) throw ConfigError("scenario.d must be at least 2");
  c.seed = get<std::uint64_t>(j, "seed", "scenario", c.seed);
  c.trials = get<int>(j, "trials", "scenario", c.trials);
  if (c.trials < 1) throw ConfigError("scenario.trials must be positive");
  c.vacuum_pads = get<int>(j, "vacuum_pads", "scenario", 0);
  if (c.vacuum_pads < 0) throw ConfigError("scenario.vacuum_pads must be non-negative");

  if (!j.contains("clusters") || !j.at("clusters").is_array() || j.at("clusters").empty()) {
    throw ConfigError("scenario.clusters must be a non-empty array");
  }
  for (std::size_t i = 0; i < j.at("clusters").size(); ++i) {
    const json& cj = j.at("clusters")[i];
    const std::string where = "clusters[" + std::to_string(i) + "]";
    check_keys(cj, {"graph", "leg"}, where);
    if (!cj.contains("graph")) throw ConfigError(where + " is missing 'graph'");
    c.clusters.push_back({cj.at("graph"), require<std::string>(cj, "leg", where)});
  }

  if (j.contains("ancillas")) {
    if (!j.at("ancillas").is_array()) throw ConfigError("scenario.ancillas must be an array");
    for (std::size_t i = 0; i < j.at("ancillas").size(); ++i) {
      const json& aj = j.at("ancillas")[i];
      const std::string where = "ancillas[" + std::to_string(i) + "]";
      check_keys(aj, {"state"}, where);
      c.ancillas.push_back(aj.contains("state") ? parse_vector(aj.at("state"), where + ".state")
                                                : CVector(CVector::Unit(c.d, 0)));
    }
  }

  if (j.contains("unitary")) {
    const json& uj = j.at("unitary");
    check_keys(uj, {"source", "name", "seed", "path"}, "unitary");
    const auto source = require<std::string>(uj, "source", "unitary");
    if (source == "preset") {
      c.unitary.kind = UnitarySource::Kind::Preset;
      c.unitary.preset = require<std::string>(uj, "name", "unitary");
      if (c.unitary.preset != "qubit-type2-eq8") throw ConfigError("unknown unitary preset '" + c.unitary.preset + "'");
    } else if (source == "haar") {
      c.unitary.kind = UnitarySource::Kind::Haar;
      if (uj.contains("seed")) c.unitary.seed = get<std::uint64_t>(uj, "seed", "unitary", 0);
    } else if (source == "file") {
      c.unitary.kind = UnitarySource::Kind::File;
      std::filesystem::path p = require<std::string>(uj, "path", "unitary");
      c.unitary.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    } else if (source == "identity") {
      c.unitary.kind = UnitarySource::Kind::Identity;
    } else {
      throw ConfigError("unitary.source must be preset, haar, file or identity");
    }
  }

  if (j.contains("objective")) {
    const json& oj = j.at("objective");
    check_keys(oj, {"mode", "entropy_threshold", "residual_threshold", "success_target"}, "objective");
    try {
      c.objective.mode = parse_objective_mode(get<std::string>(oj, "mode", "objective", to_string(c.objective.mode)));
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
    c.objective.entropy_threshold = get<double>(oj, "entropy_threshold", "objective", c.objective.entropy_threshold);
    c.objective.residual_threshold = get<double>(oj, "residual_threshold", "objective", c.objective.residual_threshold);
    c.objective.success_target = get<double>(oj, "success_target", "objective", c.objective.success_target);
  }
  try {
    c.objective.validate(c.d);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("optimizer")) {
    const json& pj = j.at("optimizer");
    check_keys(pj, {"budget", "restarts", "search_ancilla_states", "start", "initial_step", "min_step"}, "optimizer");
    auto& o = c.optimizer;
    o.budget = get<std::int64_t>(pj, "budget", "optimizer", o.budget);
    o.restarts = get<int>(pj, "restarts", "optimizer", o.restarts);
    o.search_ancilla_states = get<bool>(pj, "search_ancilla_states", "optimizer", o.search_ancilla_states);
    o.initial_step = get<double>(pj, "initial_step", "optimizer", o.initial_step);
    o.min_step = get<double>(pj, "min_step", "optimizer", o.min_step);
    const auto start = get<std::string>(pj, "start", "optimizer", "haar");
    if (start != "haar" && start != "unitary") throw ConfigError("optimizer.start must be haar or unitary");
    o.start_from_unitary = start == "unitary";
    if (o.budget < 1 || o.restarts < 1) throw ConfigError("optimizer budget and restarts must be positive");
    if (!(o.initial_step > 0.0) || !(o.min_step > 0.0)) throw ConfigError("optimizer steps must be positive");
  }

  if (j.contains("tradeoff")) {
    const json& tj = j.at("tradeoff");
    check_keys(tj, {"thresholds"}, "tradeoff");
    c.tradeoff_thresholds = require<std::vector<double>>(tj, "thresholds", "tradeoff");
    if (c.tradeoff_thresholds.empty()) throw ConfigError("tradeoff.thresholds must not be empty");
    if (!std::is_sorted(c.tradeoff_thresholds.begin(), c.tradeoff_thresholds.end())) {
      throw ConfigError("tradeoff.thresholds must be ascending");
    }
    for (double t : c.tradeoff_thresholds) {
      if (t < 0.0 || t > std::log(static_cast<double>(c.d)) + 1e-9) {
        throw ConfigError("tradeoff thresholds must lie in [0, ln d]");
      }
    }
  }

  // Build once so graph and state errors surface as configuration errors.
  try {
    (void)c.scenario();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json ScenarioConfig::to_json() const {
  json j;
  j["d"] = d;
  j["clusters"] = json::array();
  for (const auto& cl : clusters) j["clusters"].push_back({{"graph", cl.graph}, {"leg", cl.leg}});
  j["ancillas"] = json::array();
  for (const auto& a : ancillas) j["ancillas"].push_back({{"state", vector_json(a)}});
  j["vacuum_pads"] = vacuum_pads;
  json u;
  switch (unitary.kind) {
    case UnitarySource::Kind::Preset: u = {{"source", "preset"}, {"name", unitary.preset}}; break;
    case UnitarySource::Kind::Haar: u = {{"source", "haar"}, {"seed", unitary.seed.value_or(seed)}}; break;
    case UnitarySource::Kind::File: u = {{"source", "file"}, {"path", std::filesystem::absolute(unitary.path).string()}}; break;
    case UnitarySource::Kind::Identity: u = {{"source", "identity"}}; break;
  }
  j["unitary"] = u;
  j["seed"] = seed;
  j["trials"] = trials;
  j["objective"] = {{"mode", to_string(objective.mode)},
                    {"entropy_threshold", objective.entropy_threshold},
                    {"residual_threshold", objective.residual_threshold},
                    {"success_target", objective.success_target}};
  j["optimizer"] = {{"budget", optimizer.budget},
                    {"restarts", optimizer.restarts},
                    {"search_ancilla_states", optimizer.search_ancilla_states},
                    {"start", optimizer.start_from_unitary ? "unitary" : "haar"},
                    {"initial_step", optimizer.initial_step},
                    {"min_step", optimizer.min_step}};
  if (!tradeoff_thresholds.empty()) j["tradeoff"] = {{"thresholds", tradeoff_thresholds}};
  return j;
}

Scenario ScenarioConfig::scenario() const {
  Scenario s;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const QuditGraph g = parse_graph_json(clusters[i].graph.dump(), d);
    s.inputs.emplace_back(ClusterInput(build_graph_state(g), clusters[i].leg));
  }
  for (const auto& a : ancillas) {
    if (a.size() != d) throw InvalidInput("ancilla states need d = " + std::to_string(d) + " amplitudes");
    s.inputs.emplace_back(AncillaInput(a));
  }
  s.vacuum_pads = vacuum_pads;
  return s;
}

int ScenarioConfig::physical_modes() const {
  return static_cast<int>(clusters.size() + ancillas.size()) * d + vacuum_pads;
}

CMatrix ScenarioConfig::build_unitary() const {
  const int k = physical_modes();
  CMatrix u;
  switch (unitary.kind) {
    case UnitarySource::Kind::Preset:
      u = qubit_type2_unitary();
      break;
    case UnitarySource::Kind::Haar: {
      HaarSampler sampler(unitary.seed.value_or(seed));
      u = sampler.next_matrix(k);
      break;
    }
    case UnitarySource::Kind::File:
      try {
        u = read_unitary_file(unitary.path);
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
      break;
    case UnitarySource::Kind::Identity:
      u = CMatrix::Identity(k, k);
      break;
  }
  if (u.rows() != k) {
    throw ConfigError("unitary has " + std::to_string(u.rows()) + " modes but the scenario needs " + std::to_string(k));
  }
  return u;
}

VerifyConfig VerifyConfig::from_json(const json& j) {
  check_keys(j, {"d", "ancillae", "trials", "seed", "vacuum_pads", "inputs"}, "verify");
  VerifyConfig c;
  c.d = get<std::vector<int>>(j, "d", "verify", c.d);
  c.ancillae = get<std::vector<int>>(j, "ancillae", "verify", c.ancillae);
  c.trials = get<int>(j, "trials", "verify", c.trials);
  c.seed = get<std::uint64_t>(j, "seed", "verify", c.seed);
  c.vacuum_pads = get<int>(j, "vacuum_pads", "verify", c.vacuum_pads);
  const auto inputs = get<std::string>(j, "inputs", "verify", "graph");
  if (inputs == "graph") {
    c.inputs = SweepInputs::GraphState;
  } else if (inputs == "random") {
    c.inputs = SweepInputs::RandomState;
  } else {
    throw ConfigError("verify.inputs must be graph or random");
  }
  if (c.d.empty() || c.ancillae.empty()) throw ConfigError("verify.d and verify.ancillae must be non-empty");
  for (int d : c.d) {
    if (d < 2) throw ConfigError("verify.d entries must be at least 2");
  }
  for (int a : c.ancillae) {
    if (a < 0) throw ConfigError("verify.ancillae entries must be non-negative");
  }
  if (c.trials < 1) throw ConfigError("verify.trials must be positive");
  if (c.vacuum_pads < 0) throw ConfigError("verify.vacuum_pads must be non-negative");
  return c;
}

json VerifyConfig::to_json() const {
  return {{"d", d},
          {"ancillae", ancillae},
          {"trials", trials},
          {"seed", seed},
          {"vacuum_pads", vacuum_pads},
          {"inputs", inputs == SweepInputs::GraphState ? "graph" : "random"}};
}

json load_config_document(const std::filesystem::path& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("tool") && doc.contains("config")) {
    if (doc.contains("command") && doc.at("command") != command) {
      throw ConfigError("report was produced by '" + doc.at("command").get<std::string>() + "', not '" + command + "'");
    }
    return doc.at("config");
  }
  return doc;
}

}  // namespace quditfuse::cli
