#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vnfsim/model.hpp"

namespace vnfsim {

/// Exact decision state: the full allocation matrix tagged with the pending
/// event, as in the system model. Used by the finite-MDP solver only; the
/// learning agent works on the compressed practical state instead.
struct MdpState {
  AllocationMatrix alloc;
  Event event;
};

/// Flattened row-major counts followed by the event order code
/// (arrival type i -> i, departure type i -> num_types + i). Doubles as the
/// canonical sort key of the state space.
using StateKey = std::vector<std::int32_t>;

StateKey state_key(const AllocationMatrix& m, const Event& e, int num_types);

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const;
};

/// All reachable states in canonical order plus the key -> dense id index.
struct StateSpace {
  std::vector<MdpState> states;
  std::unordered_map<StateKey, int, StateKeyHash> index;

  int size() const { return static_cast<int>(states.size()); }
  /// Dense id, or -1 when the state is not part of the space.
  int id_of(const AllocationMatrix& m, const Event& e) const;
};

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

/// Enumerates every capacity-respecting allocation crossed with every
/// admissible event (arrivals always, departures only for hosted types).
/// Order is lexicographic on the flattened counts, then arrivals by type,
/// then departures by type. Throws ScenarioTooLargeError beyond `state_cap`.
StateSpace enumerate_states(const Scenario& sc, std::size_t state_cap = kDefaultStateCap);

/// Sum of all arrival rates plus mu_i per hosted instance; the exit rate of
/// the competing exponential clocks that decides the next event.
double total_event_rate(const AllocationMatrix& m, const Scenario& sc);

/// Probability that the departing type-`type` instance leaves each hosting
/// EC: counts(ec, type) / total instances of the type. Pairs are (ec, p),
/// ascending by EC; the type must be hosted somewhere.
std::vector<std::pair<int, double>> departure_site_split(const AllocationMatrix& m,
                                                         const Scenario& sc, int type);

/// Arrival states admit Reject plus PlaceAt(ec) for each feasible EC, in the
/// fixed order Reject < PlaceAt(1) < ... < PlaceAt(K); departure states admit
/// only Void. This order is also the deterministic argmax tie-break.
std::vector<Action> admissible_actions(const MdpState& s, const Scenario& sc);

/// Successor distribution of taking `a` in `s`. Probabilities sum to 1;
/// inadmissible actions throw std::invalid_argument.
std::vector<std::pair<MdpState, double>> transitions(const MdpState& s, Action a,
                                                     const Scenario& sc);

struct TransitionList {
  Action action;
  double reward = 0.0;                            // 1 on placement, 0 otherwise
  std::vector<std::pair<int, double>> successors;  // (state id, probability)
};

/// rows[state id] holds the admissible actions in tie-break order.
struct TransitionTable {
  std::vector<std::vector<TransitionList>> rows;
};

TransitionTable build_transition_table(const StateSpace& space, const Scenario& sc);

/// One action per state id.
struct Policy {
  std::vector<Action> actions;
};

using ValueFunction = Eigen::VectorXd;

inline constexpr int kDefaultMaxSweeps = 100'000;

/// Iterative policy evaluation with in-place (Gauss-Seidel) sweeps until the
/// largest per-state change is at most `theta`. Starts from `initial` when
/// its size matches, otherwise from zero. Throws ConvergenceError at the
/// sweep cap.
ValueFunction policy_evaluation(const Policy& policy, const TransitionTable& table, double gamma,
                                double theta, ValueFunction initial = ValueFunction(),
                                int max_sweeps = kDefaultMaxSweeps);

struct ImprovementResult {
  Policy policy;
  bool stable = false;  // no action changed relative to the previous policy
};

/// Greedy policy with respect to V, first-best on ties.
ImprovementResult policy_improvement(const ValueFunction& v, const TransitionTable& table,
                                     double gamma, const Policy& previous);

struct PiStats {
  int num_states = 0;
  int iterations = 0;        // improvement rounds until stable
  long long eval_sweeps = 0;  // total evaluation sweeps
  double bellman_residual = 0.0;
  int reject_with_feasible = 0;  // arrival states rejected despite room
};

struct PiSolution {
  StateSpace space;
  TransitionTable table;
  Policy policy;
  ValueFunction value;
  PiStats stats;
};

/// Policy iteration from the all-Reject/Void policy and V = 0, alternating
/// evaluation and improvement until the policy is stable.
PiSolution policy_iteration(const Scenario& sc, double gamma, double theta,
                            std::size_t state_cap = kDefaultStateCap,
                            int max_sweeps = kDefaultMaxSweeps);

/// max_s |V(s) - max_a Q(s, a)| under the table; optimality gap witness.
double bellman_residual(const ValueFunction& v, const TransitionTable& table, double gamma);

/// Solved policy in portable form. States are stored as flattened counts
/// plus a signed event code (+t arrival of type t, -t departure, 1-based).
struct PolicyArtifact {
  std::string scenario_hash;
  int num_ecs = 0;
  int num_types = 0;
  double gamma = 0.0;
  double theta = 0.0;
  std::vector<StateKey> states;  // canonical order, internal key encoding
  std::vector<Action> actions;
  std::vector<double> values;
  PiStats stats;
};

PolicyArtifact make_policy_artifact(const PiSolution& solution, const Scenario& sc, double gamma,
                                    double theta);

void write_policy_json(const PolicyArtifact& artifact, const std::filesystem::path& path);

PolicyArtifact read_policy_json(const std::filesystem::path& path);

}  // namespace vnfsim
