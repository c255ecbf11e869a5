#include "vnfsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <string>

#include "vnfsim/errors.hpp"
#include "vnfsim/util.hpp"

namespace vnfsim {

using nlohmann::json;

namespace {

/// Wraps json access so every schema violation surfaces as ConfigError.
template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad config field: ") + key);
  }
}

template <typename T>
T required_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing config field: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad config field: ") + key);
  }
}

Scenario parse_scenario(const json& doc) {
  if (!doc.contains("topology") || !doc.contains("vnf_types"))
    throw ConfigError("config needs topology and vnf_types sections");

  Topology topo;
  const json& ecs = doc.at("topology").contains("ecs") ? doc.at("topology").at("ecs") : json();
  if (!ecs.is_array() || ecs.empty()) throw ConfigError("topology.ecs must be a non-empty array");
  for (const json& e : ecs) {
    EcNode node;
    node.id = required_field<int>(e, "id");
    node.cpu_capacity = required_field<int>(e, "cpu");
    node.bw_capacity = required_field<int>(e, "bw");
    node.hops = field<int>(e, "hops", 1);
    topo.ecs.push_back(node);
  }

  std::vector<VnfType> types;
  const json& vt = doc.at("vnf_types");
  if (!vt.is_array() || vt.empty()) throw ConfigError("vnf_types must be a non-empty array");
  for (const json& t : vt) {
    VnfType type;
    type.id = required_field<int>(t, "id");
    type.cpu_demand = required_field<int>(t, "cpu");
    type.bw_demand = required_field<int>(t, "bw");
    type.arrival_rate = required_field<double>(t, "lambda");
    type.departure_rate = required_field<double>(t, "mu");
    types.push_back(type);
  }
  return make_scenario(std::move(topo), std::move(types));
}

}  // namespace

FullConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  FullConfig cfg;
  cfg.scenario = parse_scenario(doc);

  const json pi = doc.contains("pi") ? doc.at("pi") : json::object();
  cfg.pi.gamma = field<double>(pi, "gamma", cfg.pi.gamma);
  cfg.pi.theta = field<double>(pi, "theta", cfg.pi.theta);
  cfg.pi.state_cap = field<std::size_t>(pi, "state_cap", cfg.pi.state_cap);
  if (!(cfg.pi.gamma >= 0.0) || cfg.pi.gamma >= 1.0)
    throw ConfigError("pi.gamma must lie in [0, 1)");
  if (!(cfg.pi.theta > 0.0)) throw ConfigError("pi.theta must be positive");
  if (cfg.pi.state_cap < 1) throw ConfigError("pi.state_cap must be positive");

  const json ql = doc.contains("ql") ? doc.at("ql") : json::object();
  cfg.ql.agent.alpha = field<double>(ql, "alpha", cfg.ql.agent.alpha);
  cfg.ql.agent.gamma = field<double>(ql, "gamma", cfg.ql.agent.gamma);
  cfg.ql.agent.schedule.eps_min = field<double>(ql, "eps_min", cfg.ql.agent.schedule.eps_min);
  cfg.ql.agent.schedule.eps_max = field<double>(ql, "eps_max", cfg.ql.agent.schedule.eps_max);
  cfg.ql.agent.schedule.eps_decay = field<double>(ql, "eps_decay", cfg.ql.agent.schedule.eps_decay);
  cfg.ql.agent.seed = field<std::uint64_t>(ql, "seed", cfg.ql.agent.seed);
  cfg.ql.episodes = field<int>(ql, "episodes", cfg.ql.episodes);
  if (!(cfg.ql.agent.alpha >= 0.0) || !(cfg.ql.agent.alpha <= 1.0))
    throw ConfigError("ql.alpha must lie in [0, 1]");
  if (!(cfg.ql.agent.gamma >= 0.0) || !(cfg.ql.agent.gamma <= 1.0))
    throw ConfigError("ql.gamma must lie in [0, 1]");
  if (!(cfg.ql.agent.schedule.eps_min >= 0.0) || !(cfg.ql.agent.schedule.eps_max <= 1.0) ||
      cfg.ql.agent.schedule.eps_min > cfg.ql.agent.schedule.eps_max)
    throw ConfigError("ql epsilon bounds must satisfy 0 <= eps_min <= eps_max <= 1");
  if (!(cfg.ql.agent.schedule.eps_decay >= 0.0))
    throw ConfigError("ql.eps_decay must be non-negative");
  if (cfg.ql.episodes < 1) throw ConfigError("ql.episodes must be positive");

  const json files = doc.contains("files") ? doc.at("files") : json::object();
  cfg.files.n_train = field<int>(files, "n_train", cfg.files.n_train);
  cfg.files.n_eval = field<int>(files, "n_eval", cfg.files.n_eval);
  cfg.files.n_requests = field<int>(files, "n_requests", cfg.files.n_requests);
  cfg.files.base_seed = field<std::uint64_t>(files, "base_seed", cfg.files.base_seed);
  if (cfg.files.n_train < 1 || cfg.files.n_eval < 1)
    throw ConfigError("files.n_train and files.n_eval must be positive");
  if (cfg.files.n_requests < 1) throw ConfigError("files.n_requests must be positive");

  return cfg;
}

FullConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

void apply_set_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  std::string pointer = "/";
  for (char c : key) pointer += c == '.' ? '/' : c;

  json value;
  try {
    value = json::parse(raw);
    if (!value.is_primitive()) throw ConfigError("override value must be a scalar: " + assignment);
  } catch (const json::exception&) {
    value = raw;  // unquoted strings arrive verbatim
  }
  try {
    doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError("cannot apply override " + assignment + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["topology"]["ecs"] = json::array();
  for (const EcNode& ec : sc.topo.ecs) {
    j["topology"]["ecs"].push_back(
        {{"id", ec.id}, {"cpu", ec.cpu_capacity}, {"bw", ec.bw_capacity}, {"hops", ec.hops}});
  }
  j["vnf_types"] = json::array();
  for (const VnfType& t : sc.types) {
    j["vnf_types"].push_back({{"id", t.id},
                              {"cpu", t.cpu_demand},
                              {"bw", t.bw_demand},
                              {"lambda", t.arrival_rate},
                              {"mu", t.departure_rate}});
  }
  return j;
}

std::string scenario_hash(const Scenario& sc) {
  // dump() emits keys sorted and doubles in shortest round-trip form, so the
  // serialization is canonical and the hash is stable across runs.
  return to_hex16(fnv1a64(scenario_to_json(sc).dump()));
}

std::size_t env_state_cap(std::size_t fallback) {
  const char* raw = std::getenv("VNFSIM_STATE_CAP");
  if (raw == nullptr || *raw == '\0') return fallback;
  try {
    const unsigned long long v = std::stoull(raw);
    if (v < 1) throw ConfigError("VNFSIM_STATE_CAP must be positive");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("VNFSIM_STATE_CAP must be a positive integer");
  }
}

}  // namespace vnfsim
