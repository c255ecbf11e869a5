#include "vnfsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vnfsim/errors.hpp"
#include "vnfsim/qlearning.hpp"
#include "vnfsim/util.hpp"

namespace vnfsim {

namespace {

Scenario scenario_2ec_2type(int cpu1, int bw1, int cpu2, int bw2, int rc1, int rb1, int rc2,
                            int rb2, double l1, double l2, double m1, double m2) {
  Topology topo;
  topo.ecs.push_back(EcNode{1, cpu1, bw1, 1});
  topo.ecs.push_back(EcNode{2, cpu2, bw2, 1});
  std::vector<VnfType> types;
  types.push_back(VnfType{1, rc1, rb1, l1, m1});
  types.push_back(VnfType{2, rc2, rb2, l2, m2});
  return make_scenario(std::move(topo), std::move(types));
}

int round_scaled(double v, bool* rounded) {
  const double r = std::llround(v);
  if (rounded != nullptr && std::abs(r - v) > 1e-9) *rounded = true;
  return static_cast<int>(r);
}

}  // namespace

FullConfig table1_config() {
  FullConfig cfg;
  cfg.scenario = scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5);
  return cfg;  // solver and file sections keep their defaults
}

FullConfig table3_sim2_config() {
  FullConfig cfg;
  cfg.scenario = scenario_2ec_2type(5, 1000, 10, 400, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5);
  return cfg;
}

Scenario derive_arrival_rate(const Scenario& base, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("arrival factor must be positive");
  std::vector<VnfType> types = base.types;
  for (VnfType& t : types) t.arrival_rate *= factor;
  return make_scenario(base.topo, std::move(types));
}

Scenario derive_capacity(const Scenario& base, double factor, bool* rounded) {
  if (!(factor > 0.0)) throw std::invalid_argument("capacity factor must be positive");
  Topology topo = base.topo;
  for (EcNode& ec : topo.ecs) {
    ec.cpu_capacity = round_scaled(factor * ec.cpu_capacity, rounded);
    ec.bw_capacity = round_scaled(factor * ec.bw_capacity, rounded);
  }
  return make_scenario(std::move(topo), base.types);
}

Scenario derive_ec_heterogeneity(const Scenario& base, double beta, bool* rounded) {
  if (!(beta > 0.0)) throw std::invalid_argument("heterogeneity factor must be positive");
  if (base.num_ecs() != 2)
    throw std::invalid_argument("EC heterogeneity sweep needs exactly two ECs");
  // EC 1 stays fixed; EC 2 gets beta times the CPU for 1/beta the bandwidth.
  Topology topo = base.topo;
  topo.ecs[1].cpu_capacity = round_scaled(beta * topo.ecs[0].cpu_capacity, rounded);
  topo.ecs[1].bw_capacity = round_scaled(topo.ecs[0].bw_capacity / beta, rounded);
  return make_scenario(std::move(topo), base.types);
}

Scenario derive_demand_heterogeneity(const Scenario& base, double beta, bool* rounded) {
  if (!(beta > 0.0)) throw std::invalid_argument("heterogeneity factor must be positive");
  if (base.num_types() != 2)
    throw std::invalid_argument("demand heterogeneity sweep needs exactly two types");
  // Type 1 stays fixed; type 2 needs beta times the CPU for 1/beta the
  // bandwidth of type 1.
  std::vector<VnfType> types = base.types;
  types[1].cpu_demand = round_scaled(beta * types[0].cpu_demand, rounded);
  types[1].bw_demand = round_scaled(types[0].bw_demand / beta, rounded);
  return make_scenario(base.topo, std::move(types));
}

std::vector<std::string> experiment_preset_names() {
  return {"arrival_rate", "capacity", "ec_heterogeneity", "demand_heterogeneity",
          "alpha_gamma", "eps_decay"};
}

ExperimentConfig make_experiment_preset(const std::string& name, const FullConfig& base) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.pi = base.pi;
  cfg.ql = base.ql;
  cfg.files = base.files;
  cfg.base = base.scenario;

  // The swept scenarios are the study tables verbatim, not runtime
  // derivations, so float dust can never shift a published row.
  if (name == "arrival_rate") {
    cfg.sweep_param = "factor";
    cfg.points = {
        {"0.2", 0.2, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 3, 50, 0.6, 0.4, 1.0, 0.5)},
        {"1.0", 1.0, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
        {"2.0", 2.0, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 3, 50, 6.0, 4.0, 1.0, 0.5)},
    };
  } else if (name == "capacity") {
    cfg.sweep_param = "factor";
    cfg.points = {
        {"0.8", 0.8, scenario_2ec_2type(4, 800, 8, 320, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
        {"1.0", 1.0, scenario_2ec_2type(5, 1000, 10, 400, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
        {"1.2", 1.2, scenario_2ec_2type(6, 1200, 12, 480, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
    };
  } else if (name == "ec_heterogeneity") {
    cfg.sweep_param = "beta";
    cfg.points = {
        {"1.0", 1.0, scenario_2ec_2type(4, 1000, 4, 1000, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
        {"2.5", 2.5, scenario_2ec_2type(4, 1000, 10, 400, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
        {"3.0", 3.0, scenario_2ec_2type(4, 1000, 12, 333, 1, 300, 3, 50, 3.0, 2.0, 1.0, 0.5)},
    };
  } else if (name == "demand_heterogeneity") {
    cfg.sweep_param = "beta";
    cfg.points = {
        {"1.5", 1.5, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 3, 200, 3.0, 2.0, 1.0, 0.5)},
        {"2.0", 2.0, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 4, 150, 3.0, 2.0, 1.0, 0.5)},
        {"4.0", 4.0, scenario_2ec_2type(4, 1000, 12, 400, 1, 300, 8, 75, 3.0, 2.0, 1.0, 0.5)},
    };
  } else if (name == "alpha_gamma") {
    cfg.kind = ExperimentKind::LearningCurve;
    cfg.sweep_param = "alpha_gamma";
    const double decay = base.ql.agent.schedule.eps_decay;
    const int episodes = base.ql.episodes;
    cfg.curves = {
        {"a0_g0.001", 0.0, 0.001, decay, episodes},
        {"a0.5_g0.5", 0.5, 0.5, decay, episodes},
        {"a0.9_g0.9", 0.9, 0.9, decay, episodes},
        {"a0.5_g0.9", 0.5, 0.9, decay, episodes},
    };
    cfg.algorithms = {"ql"};
  } else if (name == "eps_decay") {
    cfg.kind = ExperimentKind::LearningCurve;
    cfg.sweep_param = "eps_decay";
    const double alpha = base.ql.agent.alpha;
    const double gamma = base.ql.agent.gamma;
    // The slowest schedule needs far more episodes to flatten out.
    cfg.curves = {
        {"decay0.1", alpha, gamma, 0.1, base.ql.episodes},
        {"decay0.01", alpha, gamma, 0.01, base.ql.episodes},
        {"decay0.001", alpha, gamma, 0.001, base.ql.episodes},
        {"decay0.03", alpha, gamma, 0.03, 2000},
    };
    cfg.algorithms = {"ql"};
  } else {
    throw ConfigError("unknown experiment preset: " + name);
  }
  return cfg;
}

namespace {

void run_sweep_point(const ExperimentConfig& cfg, const SweepPoint& point,
                     std::vector<ResultRow>& rows) {
  const Scenario& sc = point.scenario;
  const std::vector<Trace> train_traces =
      generate_file_set(sc.types, cfg.files.n_train, cfg.files.n_requests, cfg.files.base_seed);
  const std::vector<Trace> eval_traces = generate_file_set(
      sc.types, cfg.files.n_eval, cfg.files.n_requests,
      cfg.files.base_seed + static_cast<std::uint64_t>(cfg.files.n_train));

  auto push_row = [&](const std::string& algorithm, const Trace& trace, const EpisodeResult& ep) {
    ResultRow row;
    row.experiment = cfg.name;
    row.algorithm = algorithm;
    row.sweep_param = cfg.sweep_param;
    row.sweep_value = point.value;
    row.trace_seed = trace.seed;
    row.total = ep.total_arrivals;
    row.accepted = ep.accepted;
    row.rejected = ep.rejected;
    row.rejection_ratio = ep.rejection_ratio;
    rows.push_back(std::move(row));
  };

  for (const std::string& algorithm : cfg.algorithms) {
    if (algorithm == "pi") {
      const PiSolution sol =
          policy_iteration(sc, cfg.pi.gamma, cfg.pi.theta, cfg.pi.state_cap);
      const PolicyArtifact art = make_policy_artifact(sol, sc, cfg.pi.gamma, cfg.pi.theta);
      for (const Trace& trace : eval_traces) {
        PiPolicyAdapter policy(art, sc);
        push_row("pi", trace, run_episode(policy, trace, sc));
      }
    } else if (algorithm == "ql") {
      const TrainResult trained = train(sc, train_traces, cfg.ql.episodes, cfg.ql.agent);
      for (const Trace& trace : eval_traces) {
        const EvalResult res = evaluate(trained.table, trace, sc, cfg.ql.agent, cfg.ql.episodes);
        push_row("ql", trace, res.episode);
      }
    } else if (algorithm == "bestfit") {
      for (const Trace& trace : eval_traces) {
        BestFitPolicy policy(trace.seed);
        push_row("bestfit", trace, run_episode(policy, trace, sc));
      }
    } else {
      throw ConfigError("unknown algorithm: " + algorithm);
    }
  }
}

}  // namespace

ExperimentResults run_experiment(const ExperimentConfig& cfg) {
  ExperimentResults results;
  results.kind = cfg.kind;

  if (cfg.kind == ExperimentKind::RejectionSweep) {
    for (const SweepPoint& point : cfg.points) run_sweep_point(cfg, point, results.rows);
    results.summary = summarize_results(results.rows);
    if (cfg.algorithms.size() > 1) results.comparisons = compare_algorithms(results.rows);
    return results;
  }

  // Learning curves replay one fixed trace every episode so the curves of
  // different agent settings are directly comparable.
  const Trace trace =
      generate_trace(cfg.base.types, cfg.files.n_requests, cfg.files.base_seed);
  for (const CurvePoint& point : cfg.curves) {
    AgentConfig agent = cfg.ql.agent;
    agent.alpha = point.alpha;
    agent.gamma = point.gamma;
    agent.schedule.eps_decay = point.eps_decay;
    const TrainResult trained = train(cfg.base, {trace}, point.episodes, agent);
    LearningCurveResult curve;
    curve.label = point.label;
    curve.avg_reward = trained.curve;
    curve.final_epsilon = epsilon_at(agent.schedule, point.episodes);
    results.curves.push_back(std::move(curve));
  }
  return results;
}

void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResults& results,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (results.kind == ExperimentKind::RejectionSweep) {
    write_results_csv(results.rows, out_dir / "results.csv");
    write_summary_csv(results.summary, out_dir / "summary.csv");
    return;
  }

  std::ofstream summary(out_dir / "curves_summary.csv");
  if (!summary) throw IoError("cannot open for writing: " + (out_dir / "curves_summary.csv").string());
  summary << "experiment,label,episodes,first25_mean,last25_mean,final_epsilon\n";
  for (const LearningCurveResult& curve : results.curves) {
    write_learning_curve_csv(curve.avg_reward, out_dir / ("curve_" + curve.label + ".csv"));
    const auto window = std::min<std::size_t>(25, curve.avg_reward.size());
    double first = 0.0;
    double last = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
      first += curve.avg_reward[i];
      last += curve.avg_reward[curve.avg_reward.size() - window + i];
    }
    if (window > 0) {
      first /= static_cast<double>(window);
      last /= static_cast<double>(window);
    }
    summary << cfg.name << ',' << curve.label << ',' << curve.avg_reward.size() << ','
            << fmt_double(first) << ',' << fmt_double(last) << ',' << fmt_double(curve.final_epsilon)
            << '\n';
  }
  if (!summary) throw IoError("write failed: " + (out_dir / "curves_summary.csv").string());
}

}  // namespace vnfsim
