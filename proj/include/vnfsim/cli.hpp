#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vnfsim/config.hpp"
#include "vnfsim/experiment.hpp"
#include "vnfsim/harness.hpp"
#include "vnfsim/mdp.hpp"

namespace vnfsim {

/// Loads the config file, applies --set overrides in order, then lets
/// VNFSIM_STATE_CAP trump the configured enumeration cap.
FullConfig load_config_with_overrides(const std::filesystem::path& config_path,
                                      const std::vector<std::string>& overrides);

struct GenTracesSummary {
  int n_train = 0;
  int n_eval = 0;
  int n_requests = 0;
};

/// Writes train_###.jsonl and eval_###.jsonl under out_dir. Train seeds are
/// base_seed + 0.., eval seeds continue after them, so the two sets never
/// overlap.
GenTracesSummary cmd_gen_traces(const FullConfig& cfg, const std::filesystem::path& out_dir);

struct SolvePiSummary {
  PiStats stats;
  std::filesystem::path policy_path;
};

SolvePiSummary cmd_solve_pi(const FullConfig& cfg, const std::filesystem::path& out_dir);

struct TrainQlSummary {
  std::size_t states_seen = 0;
  int episodes = 0;
  double final_avg_reward = 0.0;
  std::filesystem::path qtable_path;
  std::filesystem::path curve_path;
};

TrainQlSummary cmd_train_ql(const FullConfig& cfg, const std::filesystem::path& traces_dir,
                            const std::filesystem::path& out_dir);

struct EvaluateSummary {
  int traces = 0;
  std::vector<SummaryRow> summary;
  std::vector<AlgorithmComparison> comparisons;
};

/// Evaluates the requested algorithms on the eval_*.jsonl traces under
/// traces_dir. An empty algorithm list means every algorithm an artifact was
/// given for, plus bestfit. pi needs policy_path, ql needs qtable_path; both
/// artifacts must match the configured scenario.
EvaluateSummary cmd_evaluate(const FullConfig& cfg,
                             const std::optional<std::filesystem::path>& policy_path,
                             const std::optional<std::filesystem::path>& qtable_path,
                             std::vector<std::string> algorithms,
                             const std::filesystem::path& traces_dir,
                             const std::filesystem::path& out_dir);

struct ExperimentSummary {
  ExperimentKind kind = ExperimentKind::RejectionSweep;
  std::size_t result_rows = 0;
  std::size_t curves = 0;
  std::vector<AlgorithmComparison> comparisons;
};

/// Runs a named preset and writes its CSV outputs under out_dir. A non-empty
/// algorithm list overrides the preset's default algorithms (sweeps only).
ExperimentSummary cmd_experiment(const std::string& preset, const FullConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const std::filesystem::path& out_dir);

}  // namespace vnfsim
