#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

#include "vnfsim/mdp.hpp"
#include "vnfsim/model.hpp"
#include "vnfsim/qlearning.hpp"

namespace vnfsim {

struct PiParams {
  double gamma = 0.99;
  double theta = 1e-6;
  std::size_t state_cap = kDefaultStateCap;
};

struct QlParams {
  AgentConfig agent;
  int episodes = 250;
};

struct FileParams {
  int n_train = 10;
  int n_eval = 20;
  int n_requests = 500;
  std::uint64_t base_seed = 42;
};

struct FullConfig {
  Scenario scenario;
  PiParams pi;
  QlParams ql;
  FileParams files;
};

/// Schema-validates the document; any missing section falls back to the
/// defaults above, any malformed field raises ConfigError.
FullConfig parse_config(const nlohmann::json& doc);

FullConfig load_config(const std::filesystem::path& path);

/// Applies one "section.key=value" assignment (e.g. "ql.alpha=0.9") onto the
/// raw document before parsing. Values are parsed as JSON scalars, falling
/// back to a string.
void apply_set_override(nlohmann::json& doc, const std::string& assignment);

/// Canonical JSON form of the placement-relevant scenario fields; its FNV-1a
/// hash ties artifacts to the scenario they were computed for.
nlohmann::json scenario_to_json(const Scenario& sc);

std::string scenario_hash(const Scenario& sc);

/// VNFSIM_STATE_CAP overrides the configured enumeration cap when set.
std::size_t env_state_cap(std::size_t fallback);

}  // namespace vnfsim
