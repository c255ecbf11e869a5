#include "vnfsim/mdp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "vnfsim/config.hpp"
#include "vnfsim/errors.hpp"

namespace vnfsim {

using nlohmann::json;

namespace {

/// Event order code used by the canonical state key.
std::int32_t event_order_code(const Event& e, int num_types) {
  return e.kind == EventKind::Arrival ? e.vnf_type : num_types + e.vnf_type;
}

Event event_from_order_code(std::int32_t code, int num_types) {
  if (code < num_types) return Event{EventKind::Arrival, code};
  return Event{EventKind::Departure, code - num_types};
}

/// Signed on-disk event code: +t arrival of type t, -t departure (1-based).
std::int32_t event_signed_code(const Event& e) {
  return e.kind == EventKind::Arrival ? e.vnf_type + 1 : -(e.vnf_type + 1);
}

Event event_from_signed_code(std::int32_t code, int num_types) {
  if (code == 0 || code > num_types || code < -num_types)
    throw IoError("bad event code in policy artifact");
  if (code > 0) return Event{EventKind::Arrival, code - 1};
  return Event{EventKind::Departure, -code - 1};
}

/// All per-type count vectors a single EC can host, lexicographic.
std::vector<std::vector<std::int32_t>> ec_local_counts(const Scenario& sc, int ec,
                                                       std::size_t cap) {
  std::vector<std::vector<std::int32_t>> out;
  std::vector<std::int32_t> cur(static_cast<std::size_t>(sc.num_types()), 0);
  auto rec = [&](auto&& self, int type, int cpu_left, int bw_left) -> void {
    if (type == sc.num_types()) {
      out.push_back(cur);
      if (out.size() > cap)
        throw ScenarioTooLargeError("state enumeration exceeds the state cap");
      return;
    }
    const int max_count =
        std::min(cpu_left / sc.cpu_demand[type], bw_left / sc.bw_demand[type]);
    for (int c = 0; c <= max_count; ++c) {
      cur[static_cast<std::size_t>(type)] = c;
      self(self, type + 1, cpu_left - c * sc.cpu_demand[type], bw_left - c * sc.bw_demand[type]);
    }
    cur[static_cast<std::size_t>(type)] = 0;
  };
  rec(rec, 0, sc.cpu_capacity[ec], sc.bw_capacity[ec]);
  return out;
}

bool key_less(const StateKey& a, const StateKey& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

StateKey state_key(const AllocationMatrix& m, const Event& e, int num_types) {
  StateKey key;
  key.reserve(static_cast<std::size_t>(m.size()) + 1);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) key.push_back(m(r, c));
  key.push_back(event_order_code(e, num_types));
  return key;
}

std::size_t StateKeyHash::operator()(const StateKey& k) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int32_t v : k) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= static_cast<std::uint64_t>(v >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

int StateSpace::id_of(const AllocationMatrix& m, const Event& e) const {
  if (states.empty()) return -1;
  const int num_types = static_cast<int>(states.front().alloc.cols());
  const auto it = index.find(state_key(m, e, num_types));
  return it == index.end() ? -1 : it->second;
}

StateSpace enumerate_states(const Scenario& sc, std::size_t state_cap) {
  const int num_ecs = sc.num_ecs();
  const int num_types = sc.num_types();

  std::vector<std::vector<std::vector<std::int32_t>>> locals;
  locals.reserve(static_cast<std::size_t>(num_ecs));
  for (int ec = 0; ec < num_ecs; ++ec) locals.push_back(ec_local_counts(sc, ec, state_cap));

  // Every allocation yields at least num_types states, so the product of the
  // local table sizes already exceeding the cap means the space will too.
  std::size_t alloc_bound = 1;
  for (const auto& l : locals) {
    if (alloc_bound > state_cap / l.size())
      throw ScenarioTooLargeError("state enumeration exceeds the state cap");
    alloc_bound *= l.size();
  }

  StateSpace space;
  std::vector<std::size_t> odo(static_cast<std::size_t>(num_ecs), 0);
  AllocationMatrix m(num_ecs, num_types);
  while (true) {
    for (int ec = 0; ec < num_ecs; ++ec)
      for (int t = 0; t < num_types; ++t)
        m(ec, t) = locals[static_cast<std::size_t>(ec)][odo[static_cast<std::size_t>(ec)]]
                         [static_cast<std::size_t>(t)];

    for (int t = 0; t < num_types; ++t)
      space.states.push_back(MdpState{m, Event{EventKind::Arrival, t}});
    for (int t = 0; t < num_types; ++t)
      if (m.col(t).sum() > 0) space.states.push_back(MdpState{m, Event{EventKind::Departure, t}});
    if (space.states.size() > state_cap)
      throw ScenarioTooLargeError("state enumeration exceeds the state cap");

    // Odometer: the last EC turns fastest, so flattened counts stay sorted.
    int ec = num_ecs - 1;
    while (ec >= 0 && ++odo[static_cast<std::size_t>(ec)] == locals[static_cast<std::size_t>(ec)].size()) {
      odo[static_cast<std::size_t>(ec)] = 0;
      --ec;
    }
    if (ec < 0) break;
  }

  space.index.reserve(space.states.size());
  for (std::size_t id = 0; id < space.states.size(); ++id)
    space.index.emplace(state_key(space.states[id].alloc, space.states[id].event, num_types),
                        static_cast<int>(id));
  return space;
}

double total_event_rate(const AllocationMatrix& m, const Scenario& sc) {
  const Eigen::VectorXd counts = m.colwise().sum().cast<double>().transpose();
  return sc.lambda.sum() + counts.dot(sc.mu);
}

std::vector<std::pair<int, double>> departure_site_split(const AllocationMatrix& m,
                                                         const Scenario& sc, int type) {
  if (type < 0 || type >= sc.num_types()) throw std::invalid_argument("VNF type index out of range");
  const int total = m.col(type).sum();
  if (total < 1) throw std::domain_error("no hosted instance of the departing type");
  std::vector<std::pair<int, double>> out;
  for (int ec = 0; ec < sc.num_ecs(); ++ec) {
    // Each instance's exponential clock has the same rate, so the site
    // probability reduces to the count share and halves stay exact.
    if (m(ec, type) > 0)
      out.emplace_back(ec, static_cast<double>(m(ec, type)) / static_cast<double>(total));
  }
  return out;
}

std::vector<Action> admissible_actions(const MdpState& s, const Scenario& sc) {
  if (s.event.kind == EventKind::Departure) return {Action::void_action()};
  std::vector<Action> out{Action::reject()};
  for (int ec : feasible_ecs(s.alloc, sc, s.event.vnf_type)) out.push_back(Action::place(ec));
  return out;
}

std::vector<std::pair<MdpState, double>> transitions(const MdpState& s, Action a,
                                                     const Scenario& sc) {
  const int num_types = sc.num_types();
  std::vector<std::pair<MdpState, double>> out;
  auto emit_events = [&](const AllocationMatrix& next, double weight) {
    const double rate = total_event_rate(next, sc);
    for (int t = 0; t < num_types; ++t)
      out.push_back({MdpState{next, Event{EventKind::Arrival, t}}, weight * sc.lambda[t] / rate});
    for (int t = 0; t < num_types; ++t) {
      const int n = next.col(t).sum();
      if (n > 0)
        out.push_back({MdpState{next, Event{EventKind::Departure, t}},
                       weight * static_cast<double>(n) * sc.mu[t] / rate});
    }
  };

  if (s.event.kind == EventKind::Arrival) {
    if (a.is_place()) {
      emit_events(apply_placement(s.alloc, sc, s.event.vnf_type, a.ec()), 1.0);
    } else if (a.is_reject()) {
      emit_events(s.alloc, 1.0);
    } else {
      throw std::invalid_argument("void is not admissible in arrival states");
    }
  } else {
    if (!a.is_void()) throw std::invalid_argument("departure states admit only void");
    for (const auto& [ec, p] : departure_site_split(s.alloc, sc, s.event.vnf_type))
      emit_events(apply_departure(s.alloc, sc, s.event.vnf_type, ec), p);
  }

  std::sort(out.begin(), out.end(), [&](const auto& lhs, const auto& rhs) {
    return key_less(state_key(lhs.first.alloc, lhs.first.event, num_types),
                    state_key(rhs.first.alloc, rhs.first.event, num_types));
  });
  // Distinct departure sites lead to distinct allocations, so duplicates are
  // impossible by construction; the merge is defensive only.
  std::vector<std::pair<MdpState, double>> merged;
  for (auto& entry : out) {
    if (!merged.empty() && alloc_equal(merged.back().first.alloc, entry.first.alloc) &&
        merged.back().first.event == entry.first.event) {
      merged.back().second += entry.second;
    } else {
      merged.push_back(std::move(entry));
    }
  }
  return merged;
}

TransitionTable build_transition_table(const StateSpace& space, const Scenario& sc) {
  TransitionTable table;
  table.rows.resize(space.states.size());
  for (std::size_t id = 0; id < space.states.size(); ++id) {
    const MdpState& s = space.states[id];
    for (Action a : admissible_actions(s, sc)) {
      TransitionList tl;
      tl.action = a;
      tl.reward = a.is_place() ? 1.0 : 0.0;
      for (const auto& [next, p] : transitions(s, a, sc)) {
        const int nid = space.id_of(next.alloc, next.event);
        if (nid < 0) throw std::logic_error("transition successor outside the enumerated space");
        tl.successors.emplace_back(nid, p);
      }
      table.rows[id].push_back(std::move(tl));
    }
  }
  return table;
}

namespace {

void check_solver_params(double gamma, double theta) {
  if (!(gamma >= 0.0) || gamma >= 1.0) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
}

/// Indices of each state's policy action inside its admissible-action row.
std::vector<int> policy_action_indices(const Policy& policy, const TransitionTable& table) {
  if (policy.actions.size() != table.rows.size())
    throw std::invalid_argument("policy size does not match the state space");
  std::vector<int> out(table.rows.size());
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    const auto& row = table.rows[s];
    int found = -1;
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (row[a].action == policy.actions[s]) {
        found = static_cast<int>(a);
        break;
      }
    }
    if (found < 0) throw std::invalid_argument("policy action not admissible in its state");
    out[s] = found;
  }
  return out;
}

double action_value(const TransitionList& tl, const ValueFunction& v, double gamma) {
  double q = 0.0;
  for (const auto& [next, p] : tl.successors) q += p * (tl.reward + gamma * v[next]);
  return q;
}

std::pair<ValueFunction, int> policy_evaluation_counted(const Policy& policy,
                                                        const TransitionTable& table, double gamma,
                                                        double theta, ValueFunction initial,
                                                        int max_sweeps) {
  check_solver_params(gamma, theta);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  ValueFunction v = initial.size() == n ? std::move(initial) : ValueFunction::Zero(n).eval();
  const std::vector<int> ai = policy_action_indices(policy, table);

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double delta = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) {
      const TransitionList& tl =
          table.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(ai[static_cast<std::size_t>(s)])];
      const double nv = action_value(tl, v, gamma);
      delta = std::max(delta, std::abs(nv - v[s]));
      v[s] = nv;  // in-place sweep: later states already see the new value
    }
    if (delta <= theta) return {std::move(v), sweep};
  }
  throw ConvergenceError("policy evaluation did not reach theta within the sweep cap");
}

}  // namespace

ValueFunction policy_evaluation(const Policy& policy, const TransitionTable& table, double gamma,
                                double theta, ValueFunction initial, int max_sweeps) {
  return policy_evaluation_counted(policy, table, gamma, theta, std::move(initial), max_sweeps)
      .first;
}

ImprovementResult policy_improvement(const ValueFunction& v, const TransitionTable& table,
                                     double gamma, const Policy& previous) {
  if (previous.actions.size() != table.rows.size())
    throw std::invalid_argument("policy size does not match the state space");
  if (v.size() != static_cast<Eigen::Index>(table.rows.size()))
    throw std::invalid_argument("value function size does not match the state space");

  ImprovementResult res;
  res.policy.actions.resize(table.rows.size());
  res.stable = true;
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    const auto& row = table.rows[s];
    std::size_t best = 0;
    double best_q = action_value(row[0], v, gamma);
    for (std::size_t a = 1; a < row.size(); ++a) {
      const double q = action_value(row[a], v, gamma);
      if (q > best_q) {  // strict: ties keep the earlier action in the fixed order
        best_q = q;
        best = a;
      }
    }
    res.policy.actions[s] = row[best].action;
    if (!(res.policy.actions[s] == previous.actions[s])) res.stable = false;
  }
  return res;
}

double bellman_residual(const ValueFunction& v, const TransitionTable& table, double gamma) {
  double residual = 0.0;
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    const auto& row = table.rows[s];
    double best_q = action_value(row[0], v, gamma);
    for (std::size_t a = 1; a < row.size(); ++a)
      best_q = std::max(best_q, action_value(row[a], v, gamma));
    residual = std::max(residual, std::abs(v[static_cast<Eigen::Index>(s)] - best_q));
  }
  return residual;
}

PiSolution policy_iteration(const Scenario& sc, double gamma, double theta,
                            std::size_t state_cap, int max_sweeps) {
  check_solver_params(gamma, theta);
  PiSolution sol;
  sol.space = enumerate_states(sc, state_cap);
  sol.table = build_transition_table(sol.space, sc);
  sol.stats.num_states = sol.space.size();

  Policy policy;
  policy.actions.reserve(sol.table.rows.size());
  for (const auto& row : sol.table.rows) policy.actions.push_back(row.front().action);

  ValueFunction v = ValueFunction::Zero(sol.space.size());
  constexpr int kMaxIterations = 1000;
  bool stable = false;
  for (int iter = 1; iter <= kMaxIterations && !stable; ++iter) {
    auto [nv, sweeps] = policy_evaluation_counted(policy, sol.table, gamma, theta, std::move(v),
                                                  max_sweeps);
    v = std::move(nv);
    sol.stats.eval_sweeps += sweeps;
    ImprovementResult imp = policy_improvement(v, sol.table, gamma, policy);
    policy = std::move(imp.policy);
    stable = imp.stable;
    sol.stats.iterations = iter;
  }
  if (!stable) throw ConvergenceError("policy iteration did not stabilize");

  for (std::size_t s = 0; s < sol.table.rows.size(); ++s) {
    if (sol.space.states[s].event.kind == EventKind::Arrival && sol.table.rows[s].size() > 1 &&
        policy.actions[s].is_reject())
      ++sol.stats.reject_with_feasible;
  }
  sol.policy = std::move(policy);
  sol.value = std::move(v);
  sol.stats.bellman_residual = bellman_residual(sol.value, sol.table, gamma);
  return sol;
}

PolicyArtifact make_policy_artifact(const PiSolution& solution, const Scenario& sc, double gamma,
                                    double theta) {
  PolicyArtifact art;
  art.scenario_hash = scenario_hash(sc);
  art.num_ecs = sc.num_ecs();
  art.num_types = sc.num_types();
  art.gamma = gamma;
  art.theta = theta;
  art.stats = solution.stats;
  art.states.reserve(solution.space.states.size());
  for (const MdpState& s : solution.space.states)
    art.states.push_back(state_key(s.alloc, s.event, sc.num_types()));
  art.actions = solution.policy.actions;
  art.values.assign(solution.value.data(), solution.value.data() + solution.value.size());
  return art;
}

void write_policy_json(const PolicyArtifact& artifact, const std::filesystem::path& path) {
  json j;
  j["scenario_hash"] = artifact.scenario_hash;
  j["num_ecs"] = artifact.num_ecs;
  j["num_types"] = artifact.num_types;
  j["gamma"] = artifact.gamma;
  j["theta"] = artifact.theta;
  j["stats"] = {{"num_states", artifact.stats.num_states},
                {"iterations", artifact.stats.iterations},
                {"eval_sweeps", artifact.stats.eval_sweeps},
                {"bellman_residual", artifact.stats.bellman_residual},
                {"reject_with_feasible", artifact.stats.reject_with_feasible}};

  json states = json::array();
  for (const StateKey& key : artifact.states) {
    json row = json::array();
    for (std::size_t i = 0; i + 1 < key.size(); ++i) row.push_back(key[i]);
    row.push_back(event_signed_code(
        event_from_order_code(key.back(), artifact.num_types)));
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);

  json actions = json::array();
  for (const Action& a : artifact.actions) actions.push_back(a.code);
  j["actions"] = std::move(actions);
  j["values"] = artifact.values;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

PolicyArtifact read_policy_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad policy artifact " + path.string() + ": " + e.what());
  }

  PolicyArtifact art;
  try {
    art.scenario_hash = j.at("scenario_hash").get<std::string>();
    art.num_ecs = j.at("num_ecs").get<int>();
    art.num_types = j.at("num_types").get<int>();
    art.gamma = j.at("gamma").get<double>();
    art.theta = j.at("theta").get<double>();
    if (j.contains("stats")) {
      const json& st = j.at("stats");
      art.stats.num_states = st.value("num_states", 0);
      art.stats.iterations = st.value("iterations", 0);
      art.stats.eval_sweeps = st.value("eval_sweeps", 0ll);
      art.stats.bellman_residual = st.value("bellman_residual", 0.0);
      art.stats.reject_with_feasible = st.value("reject_with_feasible", 0);
    }
    const json& states = j.at("states");
    const json& actions = j.at("actions");
    const json& values = j.at("values");
    if (!states.is_array() || !actions.is_array() || !values.is_array() ||
        states.size() != actions.size() || states.size() != values.size())
      throw IoError("bad policy artifact " + path.string() + ": misaligned arrays");

    const std::size_t key_size = static_cast<std::size_t>(art.num_ecs) *
                                     static_cast<std::size_t>(art.num_types) + 1;
    for (const json& row : states) {
      if (!row.is_array() || row.size() != key_size)
        throw IoError("bad policy artifact " + path.string() + ": state size mismatch");
      StateKey key;
      key.reserve(key_size);
      for (std::size_t i = 0; i + 1 < key_size; ++i) {
        const auto c = row[i].get<std::int32_t>();
        if (c < 0) throw IoError("bad policy artifact " + path.string() + ": negative count");
        key.push_back(c);
      }
      const Event e = event_from_signed_code(row[key_size - 1].get<std::int32_t>(), art.num_types);
      key.push_back(event_order_code(e, art.num_types));
      art.states.push_back(std::move(key));
    }
    for (const json& a : actions) {
      const int code = a.get<int>();
      if (code < -1 || code > art.num_ecs)
        throw IoError("bad policy artifact " + path.string() + ": action out of range");
      art.actions.push_back(Action{code});
    }
    for (const json& vj : values) {
      const double value = vj.get<double>();
      if (!std::isfinite(value))
        throw IoError("bad policy artifact " + path.string() + ": non-finite value");
      art.values.push_back(value);
    }
  } catch (const json::exception& e) {
    throw IoError("bad policy artifact " + path.string() + ": " + e.what());
  }
  return art;
}

}  // namespace vnfsim
