#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "vnfsim/harness.hpp"
#include "vnfsim/model.hpp"
#include "vnfsim/rng.hpp"
#include "vnfsim/trace.hpp"

namespace vnfsim {

/// Compressed agent state: the arriving request's demands followed by every
/// EC's free CPU and free bandwidth. Unlike the exact MDP state it forgets
/// which types occupy the nodes, which is what keeps the table small.
using PracticalState = std::vector<std::int32_t>;

PracticalState practical_state(const AllocationMatrix& m, const Scenario& sc, int type);

struct PracticalStateHash {
  std::size_t operator()(const PracticalState& s) const;
};

struct EpsilonSchedule {
  double eps_min = 0.001;
  double eps_max = 1.0;
  double eps_decay = 0.1;
};

/// eps_min + (eps_max - eps_min) * exp(-eps_decay * episode), clamped to
/// [eps_min, eps_max]; non-increasing in the episode index.
double epsilon_at(const EpsilonSchedule& schedule, int episode);

struct AgentConfig {
  double alpha = 0.5;
  double gamma = 0.5;
  EpsilonSchedule schedule;
  std::uint64_t seed = 7;
};

/// Action-value table keyed by the practical state. A state is "seen" once
/// any update touched it; reads of unseen pairs return 0. Action codes index
/// the row directly (0 reject, 1..K place).
class QTable {
 public:
  explicit QTable(int num_actions);

  int num_actions() const { return num_actions_; }
  double value(const PracticalState& s, int action_code) const;
  bool contains(const PracticalState& s) const { return rows_.count(s) != 0; }
  void set(const PracticalState& s, int action_code, double v);
  std::size_t size() const { return rows_.size(); }
  const std::unordered_map<PracticalState, std::vector<double>, PracticalStateHash>& rows() const {
    return rows_;
  }

 private:
  std::vector<double>& row(const PracticalState& s);
  int num_actions_;
  std::unordered_map<PracticalState, std::vector<double>, PracticalStateHash> rows_;
};

/// Reject plus one code per feasible EC, ascending; never empty.
std::vector<int> feasible_action_codes(const AllocationMatrix& m, const Scenario& sc, int type);

/// Highest-valued feasible action; ties keep the lowest code, so a fresh
/// table yields Reject. Consumes no randomness.
Action greedy_action(const QTable& q, const PracticalState& s, const std::vector<int>& feasible);

/// Epsilon-greedy over the feasible actions only: with probability epsilon a
/// uniform feasible action, otherwise the greedy one.
Action select_action(const QTable& q, const PracticalState& s, const std::vector<int>& feasible,
                     double epsilon, Rng& rng);

/// Q(s,a) += alpha * (r + gamma * max_{a' feasible} Q(s',a') - Q(s,a)).
/// Only the (s, a) entry changes.
void td_update(QTable& q, const PracticalState& s, int action_code, double reward,
               const PracticalState& next, const std::vector<int>& feasible_next,
               const AgentConfig& cfg);

/// Update for the final decision of an episode: no successor, target = r.
void td_update_terminal(QTable& q, const PracticalState& s, int action_code, double reward,
                        const AgentConfig& cfg);

struct TrainResult {
  QTable table;
  std::vector<double> curve;  // per-episode average reward
};

/// Runs `episodes` training episodes, cycling through the traces in order
/// (episode e plays traces[e % n]). One RNG seeded with cfg.seed drives all
/// exploration, and epsilon follows the schedule per episode.
TrainResult train(const Scenario& sc, const std::vector<Trace>& traces, int episodes,
                  const AgentConfig& cfg);

struct EvalResult {
  double rejection_ratio = 0.0;
  QTable table;  // possibly grown by learn-during-evaluation
  EpisodeResult episode;
};

/// Plays one trace greedily on states the training table knows. States the
/// training never saw fall back to the training behaviour (epsilon-greedy at
/// the post-training epsilon, with updates), so the run cannot fail on a
/// lookup miss; known states are never updated. Each call starts from a
/// fresh copy of the table and a fresh RNG, so evaluations are
/// order-independent.
EvalResult evaluate(const QTable& trained, const Trace& trace, const Scenario& sc,
                    const AgentConfig& cfg, int episodes_trained);

struct QTableArtifact {
  std::string scenario_hash;
  AgentConfig config;
  int episodes_trained = 0;
  QTable table{1};
};

void write_qtable_json(const QTableArtifact& artifact, const std::filesystem::path& path);
QTableArtifact read_qtable_json(const std::filesystem::path& path);

void write_learning_curve_csv(const std::vector<double>& curve, const std::filesystem::path& path);

}  // namespace vnfsim
