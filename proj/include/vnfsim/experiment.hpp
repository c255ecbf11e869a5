#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vnfsim/config.hpp"
#include "vnfsim/harness.hpp"
#include "vnfsim/model.hpp"

namespace vnfsim {

/// Default two-EC / two-type scenario and solver settings; also shipped as
/// configs/table1.json.
FullConfig table1_config();

/// Capacity-study base: same demands and rates, EC capacities (5, 1000) and
/// (10, 400); also shipped as configs/table3_sim2.json.
FullConfig table3_sim2_config();

enum class ExperimentKind {
  RejectionSweep,  // rejection ratio vs a swept scenario parameter
  LearningCurve,   // average reward per episode for agent settings
};

struct SweepPoint {
  std::string label;
  double value = 0.0;
  Scenario scenario;
};

struct CurvePoint {
  std::string label;
  double alpha = 0.5;
  double gamma = 0.5;
  double eps_decay = 0.1;
  int episodes = 250;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::RejectionSweep;
  std::string sweep_param;
  std::vector<SweepPoint> points;   // RejectionSweep
  std::vector<CurvePoint> curves;   // LearningCurve
  std::vector<std::string> algorithms{"pi", "ql", "bestfit"};
  PiParams pi;
  QlParams ql;
  FileParams files;
  Scenario base;  // LearningCurve scenario
};

/// Known presets: arrival_rate, capacity, ec_heterogeneity,
/// demand_heterogeneity (rejection sweeps over their study tables) and
/// alpha_gamma, eps_decay (learning curves). Solver/file settings come from
/// `base`; the swept scenarios are fixed by the preset. Unknown names raise
/// ConfigError.
ExperimentConfig make_experiment_preset(const std::string& name, const FullConfig& base);

std::vector<std::string> experiment_preset_names();

/// Scenario derivation rules behind the sweep studies, usable for custom
/// factors. Capacity-like derivations round to the nearest integer and
/// report the rounding through the optional flag.
Scenario derive_arrival_rate(const Scenario& base, double factor);
Scenario derive_capacity(const Scenario& base, double factor, bool* rounded = nullptr);
Scenario derive_ec_heterogeneity(const Scenario& base, double beta, bool* rounded = nullptr);
Scenario derive_demand_heterogeneity(const Scenario& base, double beta, bool* rounded = nullptr);

struct LearningCurveResult {
  std::string label;
  std::vector<double> avg_reward;  // per episode
  double final_epsilon = 0.0;
};

struct ExperimentResults {
  ExperimentKind kind = ExperimentKind::RejectionSweep;
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<AlgorithmComparison> comparisons;
  std::vector<LearningCurveResult> curves;
};

/// Runs the experiment. Rejection sweeps regenerate the train/eval trace
/// sets per sweep point from the same base seed and feed the identical
/// traces to every algorithm; learning curves train on the first train
/// trace only, as the agent studies do.
ExperimentResults run_experiment(const ExperimentConfig& cfg);

/// Writes results.csv + summary.csv (sweeps) or curve_<label>.csv files +
/// curves_summary.csv (learning curves) into `out_dir`.
void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResults& results,
                              const std::filesystem::path& out_dir);

}  // namespace vnfsim
