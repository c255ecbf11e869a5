#include "vnfsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "vnfsim/bestfit.hpp"
#include "vnfsim/config.hpp"
#include "vnfsim/errors.hpp"
#include "vnfsim/util.hpp"

namespace vnfsim {

namespace {

struct ScheduledDeparture {
  double time = 0.0;
  int seq = 0;  // accept order breaks time ties deterministically
  int vnf_type = 0;
  int ec = 0;
};

struct DepartureLater {
  bool operator()(const ScheduledDeparture& a, const ScheduledDeparture& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

}  // namespace

EpisodeResult run_episode(PlacementPolicy& policy, const Trace& trace, const Scenario& sc) {
  AllocationMatrix alloc = empty_allocation(sc);
  std::priority_queue<ScheduledDeparture, std::vector<ScheduledDeparture>, DepartureLater> pending;
  EpisodeResult result;
  result.steps.reserve(trace.records.size());

  double now = 0.0;
  for (const TraceRecord& rec : trace.records) {
    if (rec.vnf_type < 0 || rec.vnf_type >= sc.num_types())
      throw std::invalid_argument("trace type out of range for the scenario");
    now += rec.inter_arrival;

    // Departures due at the arrival instant are applied before the decision.
    while (!pending.empty() && pending.top().time <= now) {
      const ScheduledDeparture dep = pending.top();
      pending.pop();
      alloc = apply_departure(alloc, sc, dep.vnf_type, dep.ec);
      validate_allocation(alloc, sc);
      ++result.departures_processed;
    }

    const std::vector<int> feasible = feasible_ecs(alloc, sc, rec.vnf_type);
    const DecisionContext ctx{alloc, sc, rec.vnf_type, now, rec.seq, feasible};
    const Action action = policy.decide(ctx);

    if (action.is_place()) {
      if (std::find(feasible.begin(), feasible.end(), action.ec()) == feasible.end())
        throw std::domain_error("policy returned an infeasible placement");
      alloc = apply_placement(alloc, sc, rec.vnf_type, action.ec());
      validate_allocation(alloc, sc);
      pending.push(ScheduledDeparture{now + rec.holding_time, rec.seq, rec.vnf_type, action.ec()});
      ++result.accepted;
    } else if (action.is_reject()) {
      ++result.rejected;  // no departure is ever scheduled for a rejection
    } else {
      throw std::domain_error("void is not a valid arrival decision");
    }

    result.steps.push_back(StepLog{rec.seq, rec.vnf_type, now, action});
    ++result.total_arrivals;
  }
  policy.episode_end();

  result.departures_pending = static_cast<int>(pending.size());
  if (result.total_arrivals > 0) {
    result.rejection_ratio =
        static_cast<double>(result.rejected) / static_cast<double>(result.total_arrivals);
    result.avg_reward =
        static_cast<double>(result.accepted) / static_cast<double>(result.total_arrivals);
  }
  return result;
}

PiPolicyAdapter::PiPolicyAdapter(const PolicyArtifact& artifact, const Scenario& sc)
    : num_types_(sc.num_types()) {
  if (artifact.scenario_hash != scenario_hash(sc))
    throw ArtifactMismatchError("policy artifact was solved for a different scenario");
  if (artifact.num_ecs != sc.num_ecs() || artifact.num_types != sc.num_types())
    throw ArtifactMismatchError("policy artifact dimensions do not match the scenario");
  actions_.reserve(artifact.states.size());
  for (std::size_t i = 0; i < artifact.states.size(); ++i)
    actions_.emplace(artifact.states[i], artifact.actions[i]);
}

Action PiPolicyAdapter::decide(const DecisionContext& ctx) {
  const auto it =
      actions_.find(state_key(ctx.alloc, Event{EventKind::Arrival, ctx.vnf_type}, num_types_));
  if (it == actions_.end())
    throw ArtifactMismatchError("reached a state the policy artifact does not cover");
  return it->second;
}

Action BestFitPolicy::decide(const DecisionContext& ctx) {
  return bestfit_place(ctx.alloc, ctx.scenario, ctx.vnf_type, rng_);
}

Action RejectAllPolicy::decide(const DecisionContext&) { return Action::reject(); }

Action FirstFeasiblePolicy::decide(const DecisionContext& ctx) {
  return ctx.feasible.empty() ? Action::reject() : Action::place(ctx.feasible.front());
}

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows) {
  // Keyed maps keep the output order independent of the input order.
  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& row : rows) groups[{row.algorithm, row.sweep_value}].push_back(&row);

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.experiment = members.front()->experiment;
    s.algorithm = key.first;
    s.sweep_param = members.front()->sweep_param;
    s.sweep_value = key.second;
    s.n = static_cast<int>(members.size());
    double sum = 0.0;
    for (const ResultRow* r : members) sum += r->rejection_ratio;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
      double sq = 0.0;
      for (const ResultRow* r : members) {
        const double d = r->rejection_ratio - s.mean;
        sq += d * d;
      }
      s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AlgorithmComparison> compare_algorithms(const std::vector<ResultRow>& rows) {
  // Fairness check: within a sweep value every algorithm must have been run
  // on exactly the same set of trace seeds.
  std::map<double, std::map<std::string, std::set<std::uint64_t>>> seeds;
  for (const ResultRow& row : rows) seeds[row.sweep_value][row.algorithm].insert(row.trace_seed);
  for (const auto& [value, per_alg] : seeds) {
    const auto& reference = per_alg.begin()->second;
    for (const auto& [alg, set] : per_alg) {
      if (set != reference)
        throw std::invalid_argument("algorithms were evaluated on different trace sets");
    }
  }

  const std::vector<SummaryRow> summary = summarize_results(rows);
  std::map<double, AlgorithmComparison> by_value;
  for (const SummaryRow& s : summary) {
    AlgorithmComparison& cmp = by_value[s.sweep_value];
    cmp.sweep_value = s.sweep_value;
    cmp.per_algorithm.push_back(s);
  }

  std::vector<AlgorithmComparison> out;
  out.reserve(by_value.size());
  for (auto& [value, cmp] : by_value) {
    auto mean_of = [&](const std::string& alg) -> const SummaryRow* {
      for (const SummaryRow& s : cmp.per_algorithm)
        if (s.algorithm == alg) return &s;
      return nullptr;
    };
    const SummaryRow* pi = mean_of("pi");
    const SummaryRow* ql = mean_of("ql");
    const SummaryRow* bf = mean_of("bestfit");
    if (pi && ql) {
      cmp.has_ql_minus_pi = true;
      cmp.ql_minus_pi = ql->mean - pi->mean;
    }
    if (ql && bf) {
      cmp.has_bf_minus_ql = true;
      cmp.bf_minus_ql = bf->mean - ql->mean;
    }
    out.push_back(std::move(cmp));
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "experiment,algorithm,sweep_param,sweep_value,trace_seed,total,accepted,rejected,"
         "rejection_ratio\n";
  for (const ResultRow& r : rows) {
    out << r.experiment << ',' << r.algorithm << ',' << r.sweep_param << ','
        << fmt_double(r.sweep_value) << ',' << r.trace_seed << ',' << r.total << ',' << r.accepted
        << ',' << r.rejected << ',' << fmt_double(r.rejection_ratio) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "experiment,algorithm,sweep_param,sweep_value,n,mean,std\n";
  for (const SummaryRow& r : rows) {
    out << r.experiment << ',' << r.algorithm << ',' << r.sweep_param << ','
        << fmt_double(r.sweep_value) << ',' << r.n << ',' << fmt_double(r.mean) << ','
        << fmt_double(r.stddev) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace vnfsim
