#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "vnfsim/mdp.hpp"
#include "vnfsim/model.hpp"
#include "vnfsim/rng.hpp"
#include "vnfsim/trace.hpp"

namespace vnfsim {

struct StepLog {
  int seq = 0;
  int vnf_type = 0;  // 0-based
  double time = 0.0;
  Action action;
};

struct EpisodeResult {
  int total_arrivals = 0;
  int accepted = 0;
  int rejected = 0;
  double rejection_ratio = 0.0;
  double avg_reward = 0.0;  // accepted / total, the per-episode learning signal
  int departures_processed = 0;
  int departures_pending = 0;  // still scheduled when the trace ran out
  std::vector<StepLog> steps;
};

/// Everything a policy may look at when an arrival must be decided.
struct DecisionContext {
  const AllocationMatrix& alloc;
  const Scenario& scenario;
  int vnf_type;  // 0-based
  double time;
  int seq;
  const std::vector<int>& feasible;  // 0-based EC indices, ascending
};

class PlacementPolicy {
 public:
  virtual ~PlacementPolicy() = default;
  virtual Action decide(const DecisionContext& ctx) = 0;
  /// Called once after the last arrival; lets learners flush pending updates.
  virtual void episode_end() {}
};

/// Replays a trace event by event: accepted instances schedule a departure
/// at accept time + holding time, departures due at or before an arrival are
/// applied first (ties by schedule order), and the allocation is validated
/// after every change. Policies returning an infeasible placement or void
/// fail fast.
EpisodeResult run_episode(PlacementPolicy& policy, const Trace& trace, const Scenario& sc);

/// Plays a solved exact policy. Construction checks the artifact's scenario
/// hash; a lookup miss during play means the artifact belongs to some other
/// scenario and raises ArtifactMismatchError.
class PiPolicyAdapter : public PlacementPolicy {
 public:
  PiPolicyAdapter(const PolicyArtifact& artifact, const Scenario& sc);
  Action decide(const DecisionContext& ctx) override;

 private:
  std::unordered_map<StateKey, Action, StateKeyHash> actions_;
  int num_types_;
};

class BestFitPolicy : public PlacementPolicy {
 public:
  explicit BestFitPolicy(std::uint64_t seed) : rng_(seed) {}
  Action decide(const DecisionContext& ctx) override;

 private:
  Rng rng_;
};

/// Baselines used by tests and comparisons.
class RejectAllPolicy : public PlacementPolicy {
 public:
  Action decide(const DecisionContext& ctx) override;
};

class FirstFeasiblePolicy : public PlacementPolicy {
 public:
  Action decide(const DecisionContext& ctx) override;
};

/// One evaluation episode of one algorithm on one trace.
struct ResultRow {
  std::string experiment;
  std::string algorithm;
  std::string sweep_param;
  double sweep_value = 0.0;
  std::uint64_t trace_seed = 0;
  int total = 0;
  int accepted = 0;
  int rejected = 0;
  double rejection_ratio = 0.0;
};

/// Mean/stddev of the rejection ratio per (algorithm, sweep value) group.
struct SummaryRow {
  std::string experiment;
  std::string algorithm;
  std::string sweep_param;
  double sweep_value = 0.0;
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 when n < 2
};

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows);

/// Per sweep value: each algorithm's mean/stddev plus the pairwise deltas of
/// means. Throws std::invalid_argument when algorithms were evaluated on
/// different trace sets, which would make the comparison unfair.
struct AlgorithmComparison {
  double sweep_value = 0.0;
  std::vector<SummaryRow> per_algorithm;
  bool has_ql_minus_pi = false;
  double ql_minus_pi = 0.0;
  bool has_bf_minus_ql = false;
  double bf_minus_ql = 0.0;
};

std::vector<AlgorithmComparison> compare_algorithms(const std::vector<ResultRow>& rows);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

}  // namespace vnfsim
