#include "vnfsim/qlearning.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <utility>

#include "vnfsim/config.hpp"
#include "vnfsim/errors.hpp"
#include "vnfsim/util.hpp"

namespace vnfsim {

using nlohmann::json;

namespace {

void check_schedule(const EpsilonSchedule& s) {
  if (!(s.eps_min >= 0.0) || !(s.eps_max <= 1.0) || s.eps_min > s.eps_max)
    throw std::invalid_argument("epsilon bounds must satisfy 0 <= eps_min <= eps_max <= 1");
  if (!(s.eps_decay >= 0.0)) throw std::invalid_argument("eps_decay must be non-negative");
}

void check_agent(const AgentConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !(cfg.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(cfg.gamma >= 0.0) || !(cfg.gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1]");
  check_schedule(cfg.schedule);
}

// Skips row creation for a vacuous update (value unchanged on an unseen
// state): with alpha = 0 the table stays literally unchanged, and row
// existence keeps meaning "something was learned here", which is what the
// evaluation membership test consults.
void store_q(QTable& q, const PracticalState& s, int action_code, double old, double updated) {
  if (updated == old && !q.contains(s)) return;
  q.set(s, action_code, updated);
}

}  // namespace

PracticalState practical_state(const AllocationMatrix& m, const Scenario& sc, int type) {
  if (type < 0 || type >= sc.num_types()) throw std::invalid_argument("VNF type index out of range");
  PracticalState s;
  s.reserve(2 + 2 * static_cast<std::size_t>(sc.num_ecs()));
  s.push_back(sc.cpu_demand[type]);
  s.push_back(sc.bw_demand[type]);
  for (int ec = 0; ec < sc.num_ecs(); ++ec) s.push_back(free_cpu(m, sc, ec));
  for (int ec = 0; ec < sc.num_ecs(); ++ec) s.push_back(free_bw(m, sc, ec));
  return s;
}

std::size_t PracticalStateHash::operator()(const PracticalState& s) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int32_t v : s) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= static_cast<std::uint64_t>(v >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

double epsilon_at(const EpsilonSchedule& schedule, int episode) {
  check_schedule(schedule);
  if (episode < 0) throw std::invalid_argument("episode index must be non-negative");
  const double eps =
      schedule.eps_min + (schedule.eps_max - schedule.eps_min) *
                             std::exp(-schedule.eps_decay * static_cast<double>(episode));
  return std::clamp(eps, schedule.eps_min, schedule.eps_max);
}

QTable::QTable(int num_actions) : num_actions_(num_actions) {
  if (num_actions < 1) throw std::invalid_argument("QTable needs at least one action");
}

double QTable::value(const PracticalState& s, int action_code) const {
  if (action_code < 0 || action_code >= num_actions_)
    throw std::invalid_argument("action code out of range");
  const auto it = rows_.find(s);
  return it == rows_.end() ? 0.0 : it->second[static_cast<std::size_t>(action_code)];
}

std::vector<double>& QTable::row(const PracticalState& s) {
  const auto it = rows_.find(s);
  if (it != rows_.end()) return it->second;
  return rows_.emplace(s, std::vector<double>(static_cast<std::size_t>(num_actions_), 0.0))
      .first->second;
}

void QTable::set(const PracticalState& s, int action_code, double v) {
  if (action_code < 0 || action_code >= num_actions_)
    throw std::invalid_argument("action code out of range");
  row(s)[static_cast<std::size_t>(action_code)] = v;
}

std::vector<int> feasible_action_codes(const AllocationMatrix& m, const Scenario& sc, int type) {
  std::vector<int> codes{Action::reject().code};
  for (int ec : feasible_ecs(m, sc, type)) codes.push_back(Action::place(ec).code);
  return codes;
}

Action greedy_action(const QTable& q, const PracticalState& s, const std::vector<int>& feasible) {
  if (feasible.empty()) throw std::invalid_argument("feasible action set must not be empty");
  int best = feasible.front();
  double best_v = q.value(s, best);
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    const double v = q.value(s, feasible[i]);
    if (v > best_v) {  // strict: ties keep the lowest code, Reject first
      best_v = v;
      best = feasible[i];
    }
  }
  return Action{best};
}

Action select_action(const QTable& q, const PracticalState& s, const std::vector<int>& feasible,
                     double epsilon, Rng& rng) {
  if (feasible.empty()) throw std::invalid_argument("feasible action set must not be empty");
  if (!(epsilon >= 0.0) || !(epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (rng.uniform01() < epsilon)
    return Action{feasible[static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::uint64_t>(feasible.size())))]};
  return greedy_action(q, s, feasible);
}

void td_update(QTable& q, const PracticalState& s, int action_code, double reward,
               const PracticalState& next, const std::vector<int>& feasible_next,
               const AgentConfig& cfg) {
  check_agent(cfg);
  if (feasible_next.empty()) throw std::invalid_argument("feasible action set must not be empty");
  double best_next = q.value(next, feasible_next.front());
  for (std::size_t i = 1; i < feasible_next.size(); ++i)
    best_next = std::max(best_next, q.value(next, feasible_next[i]));
  const double old = q.value(s, action_code);
  store_q(q, s, action_code, old, old + cfg.alpha * (reward + cfg.gamma * best_next - old));
}

void td_update_terminal(QTable& q, const PracticalState& s, int action_code, double reward,
                        const AgentConfig& cfg) {
  check_agent(cfg);
  const double old = q.value(s, action_code);
  store_q(q, s, action_code, old, old + cfg.alpha * (reward - old));
}

namespace {

/// Decision plug for run_episode covering both phases of the agent's life.
/// Updates are deferred by one decision because the TD target needs the
/// successor state, which only exists at the next arrival; episode_end
/// flushes the last one with no successor.
class QlPolicy : public PlacementPolicy {
 public:
  enum class Mode { Train, Eval };

  QlPolicy(QTable& live, const QTable* known, const Scenario& sc, const AgentConfig& cfg,
           double epsilon, Rng& rng, Mode mode)
      : live_(live), known_(known), sc_(sc), cfg_(cfg), epsilon_(epsilon), rng_(rng), mode_(mode) {}

  Action decide(const DecisionContext& ctx) override {
    PracticalState s = practical_state(ctx.alloc, sc_, ctx.vnf_type);
    std::vector<int> feasible{Action::reject().code};
    for (int ec : ctx.feasible) feasible.push_back(Action::place(ec).code);

    if (pending_) {
      td_update(live_, pending_->s, pending_->action, pending_->reward, s, feasible, cfg_);
      pending_.reset();
    }

    // Membership is judged against the table as of evaluation start, so a
    // state learned during this very evaluation keeps its training-style
    // treatment for the whole episode.
    if (mode_ == Mode::Eval && known_->contains(s))
      return greedy_action(live_, s, feasible);

    const Action a = select_action(live_, s, feasible, epsilon_, rng_);
    pending_ = Pending{std::move(s), a.code, a.is_place() ? 1.0 : 0.0};
    return a;
  }

  void episode_end() override {
    if (pending_) {
      td_update_terminal(live_, pending_->s, pending_->action, pending_->reward, cfg_);
      pending_.reset();
    }
  }

 private:
  struct Pending {
    PracticalState s;
    int action = 0;
    double reward = 0.0;
  };

  QTable& live_;
  const QTable* known_;  // evaluation membership snapshot, null when training
  const Scenario& sc_;
  const AgentConfig& cfg_;
  double epsilon_;
  Rng& rng_;
  Mode mode_;
  std::optional<Pending> pending_;
};

}  // namespace

TrainResult train(const Scenario& sc, const std::vector<Trace>& traces, int episodes,
                  const AgentConfig& cfg) {
  check_agent(cfg);
  if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
  if (episodes > 0 && traces.empty()) throw std::invalid_argument("training needs at least one trace");

  TrainResult res{QTable(sc.num_ecs() + 1), {}};
  res.curve.reserve(static_cast<std::size_t>(episodes));
  Rng rng(cfg.seed);
  for (int e = 0; e < episodes; ++e) {
    const double eps = epsilon_at(cfg.schedule, e);
    QlPolicy policy(res.table, nullptr, sc, cfg, eps, rng, QlPolicy::Mode::Train);
    const EpisodeResult ep = run_episode(policy, traces[static_cast<std::size_t>(e) % traces.size()], sc);
    res.curve.push_back(ep.avg_reward);
  }
  return res;
}

EvalResult evaluate(const QTable& trained, const Trace& trace, const Scenario& sc,
                    const AgentConfig& cfg, int episodes_trained) {
  check_agent(cfg);
  if (episodes_trained < 0) throw std::invalid_argument("episodes_trained must be non-negative");
  if (trained.num_actions() != sc.num_ecs() + 1)
    throw ArtifactMismatchError("Q-table action count does not match the scenario");

  QTable live = trained;
  Rng rng(cfg.seed);
  const double eps = epsilon_at(cfg.schedule, episodes_trained);
  QlPolicy policy(live, &trained, sc, cfg, eps, rng, QlPolicy::Mode::Eval);
  EpisodeResult ep = run_episode(policy, trace, sc);
  return EvalResult{ep.rejection_ratio, std::move(live), std::move(ep)};
}

void write_qtable_json(const QTableArtifact& artifact, const std::filesystem::path& path) {
  json j;
  j["scenario_hash"] = artifact.scenario_hash;
  j["episodes_trained"] = artifact.episodes_trained;
  j["num_actions"] = artifact.table.num_actions();
  j["config"] = {{"alpha", artifact.config.alpha},
                 {"gamma", artifact.config.gamma},
                 {"eps_min", artifact.config.schedule.eps_min},
                 {"eps_max", artifact.config.schedule.eps_max},
                 {"eps_decay", artifact.config.schedule.eps_decay},
                 {"seed", artifact.config.seed}};

  std::vector<const PracticalState*> keys;
  keys.reserve(artifact.table.rows().size());
  for (const auto& [state, row] : artifact.table.rows()) keys.push_back(&state);
  std::sort(keys.begin(), keys.end(), [](const PracticalState* a, const PracticalState* b) {
    return std::lexicographical_compare(a->begin(), a->end(), b->begin(), b->end());
  });

  json entries = json::array();
  for (const PracticalState* state : keys) {
    const auto& row = artifact.table.rows().at(*state);
    for (std::size_t a = 0; a < row.size(); ++a) {
      json entry;
      entry["state"] = *state;
      entry["action"] = a;
      entry["value"] = row[a];
      entries.push_back(std::move(entry));
    }
  }
  j["entries"] = std::move(entries);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

QTableArtifact read_qtable_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad Q-table artifact " + path.string() + ": " + e.what());
  }

  try {
    const int num_actions = j.at("num_actions").get<int>();
    QTableArtifact art;
    art.table = QTable(num_actions);
    art.scenario_hash = j.at("scenario_hash").get<std::string>();
    art.episodes_trained = j.at("episodes_trained").get<int>();
    const json& cfg = j.at("config");
    art.config.alpha = cfg.at("alpha").get<double>();
    art.config.gamma = cfg.at("gamma").get<double>();
    art.config.schedule.eps_min = cfg.at("eps_min").get<double>();
    art.config.schedule.eps_max = cfg.at("eps_max").get<double>();
    art.config.schedule.eps_decay = cfg.at("eps_decay").get<double>();
    art.config.seed = cfg.at("seed").get<std::uint64_t>();
    check_agent(art.config);

    for (const json& entry : j.at("entries")) {
      const auto state = entry.at("state").get<PracticalState>();
      const int action = entry.at("action").get<int>();
      const double value = entry.at("value").get<double>();
      if (action < 0 || action >= num_actions)
        throw IoError("bad Q-table artifact " + path.string() + ": action out of range");
      if (!std::isfinite(value))
        throw IoError("bad Q-table artifact " + path.string() + ": non-finite value");
      art.table.set(state, action, value);
    }
    return art;
  } catch (const json::exception& e) {
    throw IoError("bad Q-table artifact " + path.string() + ": " + e.what());
  }
}

void write_learning_curve_csv(const std::vector<double>& curve,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "episode,avg_reward\n";
  for (std::size_t e = 0; e < curve.size(); ++e) out << e << ',' << fmt_double(curve[e]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace vnfsim
