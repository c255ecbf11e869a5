#include "vnfsim/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "vnfsim/errors.hpp"
#include "vnfsim/qlearning.hpp"
#include "vnfsim/trace.hpp"

namespace vnfsim {

using nlohmann::json;

namespace {

std::string trace_filename(const std::string& prefix, int idx) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", idx);
  return prefix + "_" + buf + ".jsonl";
}

void check_traces_match(const std::vector<Trace>& traces, const Scenario& sc,
                        const std::string& what) {
  for (const Trace& t : traces) {
    if (static_cast<int>(t.lambda.size()) != sc.num_types())
      throw ArtifactMismatchError(what + " trace has a different VNF type count than the scenario");
  }
}

}  // namespace

FullConfig load_config_with_overrides(const std::filesystem::path& config_path,
                                      const std::vector<std::string>& overrides) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config: " + config_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  for (const std::string& assignment : overrides) apply_set_override(doc, assignment);
  FullConfig cfg = parse_config(doc);
  cfg.pi.state_cap = env_state_cap(cfg.pi.state_cap);
  return cfg;
}

GenTracesSummary cmd_gen_traces(const FullConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::vector<Trace> train = generate_file_set(cfg.scenario.types, cfg.files.n_train,
                                                     cfg.files.n_requests, cfg.files.base_seed);
  const std::vector<Trace> eval = generate_file_set(
      cfg.scenario.types, cfg.files.n_eval, cfg.files.n_requests,
      cfg.files.base_seed + static_cast<std::uint64_t>(cfg.files.n_train));
  for (std::size_t i = 0; i < train.size(); ++i)
    write_trace_jsonl(train[i], out_dir / trace_filename("train", static_cast<int>(i)));
  for (std::size_t i = 0; i < eval.size(); ++i)
    write_trace_jsonl(eval[i], out_dir / trace_filename("eval", static_cast<int>(i)));
  return GenTracesSummary{cfg.files.n_train, cfg.files.n_eval, cfg.files.n_requests};
}

SolvePiSummary cmd_solve_pi(const FullConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const PiSolution sol =
      policy_iteration(cfg.scenario, cfg.pi.gamma, cfg.pi.theta, cfg.pi.state_cap);
  const PolicyArtifact art = make_policy_artifact(sol, cfg.scenario, cfg.pi.gamma, cfg.pi.theta);
  SolvePiSummary summary{sol.stats, out_dir / "policy.json"};
  write_policy_json(art, summary.policy_path);
  return summary;
}

TrainQlSummary cmd_train_ql(const FullConfig& cfg, const std::filesystem::path& traces_dir,
                            const std::filesystem::path& out_dir) {
  const std::vector<Trace> traces = read_trace_dir(traces_dir, "train");
  if (traces.empty()) throw IoError("no train_*.jsonl traces under " + traces_dir.string());
  check_traces_match(traces, cfg.scenario, "training");

  const TrainResult trained = train(cfg.scenario, traces, cfg.ql.episodes, cfg.ql.agent);

  std::filesystem::create_directories(out_dir);
  QTableArtifact art;
  art.scenario_hash = scenario_hash(cfg.scenario);
  art.config = cfg.ql.agent;
  art.episodes_trained = cfg.ql.episodes;
  art.table = trained.table;

  TrainQlSummary summary;
  summary.states_seen = trained.table.size();
  summary.episodes = cfg.ql.episodes;
  summary.final_avg_reward = trained.curve.empty() ? 0.0 : trained.curve.back();
  summary.qtable_path = out_dir / "qtable.json";
  summary.curve_path = out_dir / "learning_curve.csv";
  write_qtable_json(art, summary.qtable_path);
  write_learning_curve_csv(trained.curve, summary.curve_path);
  return summary;
}

EvaluateSummary cmd_evaluate(const FullConfig& cfg,
                             const std::optional<std::filesystem::path>& policy_path,
                             const std::optional<std::filesystem::path>& qtable_path,
                             std::vector<std::string> algorithms,
                             const std::filesystem::path& traces_dir,
                             const std::filesystem::path& out_dir) {
  if (algorithms.empty()) {
    if (policy_path) algorithms.push_back("pi");
    if (qtable_path) algorithms.push_back("ql");
    algorithms.push_back("bestfit");
  }
  const std::set<std::string> known{"pi", "ql", "bestfit"};
  for (const std::string& a : algorithms)
    if (known.count(a) == 0) throw ConfigError("unknown algorithm: " + a);
  if (std::count(algorithms.begin(), algorithms.end(), "pi") > 0 && !policy_path)
    throw ConfigError("evaluating pi needs --policy");
  if (std::count(algorithms.begin(), algorithms.end(), "ql") > 0 && !qtable_path)
    throw ConfigError("evaluating ql needs --qtable");

  const std::vector<Trace> traces = read_trace_dir(traces_dir, "eval");
  if (traces.empty()) throw IoError("no eval_*.jsonl traces under " + traces_dir.string());
  check_traces_match(traces, cfg.scenario, "evaluation");

  const std::string expected_hash = scenario_hash(cfg.scenario);
  std::vector<ResultRow> rows;
  auto push_row = [&](const std::string& algorithm, const Trace& trace, const EpisodeResult& ep) {
    ResultRow row;
    row.experiment = "evaluate";
    row.algorithm = algorithm;
    row.sweep_param = "none";
    row.sweep_value = 0.0;
    row.trace_seed = trace.seed;
    row.total = ep.total_arrivals;
    row.accepted = ep.accepted;
    row.rejected = ep.rejected;
    row.rejection_ratio = ep.rejection_ratio;
    rows.push_back(std::move(row));
  };

  for (const std::string& algorithm : algorithms) {
    if (algorithm == "pi") {
      const PolicyArtifact art = read_policy_json(*policy_path);
      for (const Trace& trace : traces) {
        PiPolicyAdapter policy(art, cfg.scenario);  // checks the scenario hash
        push_row("pi", trace, run_episode(policy, trace, cfg.scenario));
      }
    } else if (algorithm == "ql") {
      const QTableArtifact art = read_qtable_json(*qtable_path);
      if (art.scenario_hash != expected_hash)
        throw ArtifactMismatchError("Q-table artifact was trained for a different scenario");
      for (const Trace& trace : traces) {
        const EvalResult res =
            evaluate(art.table, trace, cfg.scenario, art.config, art.episodes_trained);
        push_row("ql", trace, res.episode);
      }
    } else {
      for (const Trace& trace : traces) {
        BestFitPolicy policy(trace.seed);
        push_row("bestfit", trace, run_episode(policy, trace, cfg.scenario));
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  write_results_csv(rows, out_dir / "results.csv");
  EvaluateSummary summary;
  summary.traces = static_cast<int>(traces.size());
  summary.summary = summarize_results(rows);
  write_summary_csv(summary.summary, out_dir / "summary.csv");
  if (algorithms.size() > 1) summary.comparisons = compare_algorithms(rows);
  return summary;
}

ExperimentSummary cmd_experiment(const std::string& preset, const FullConfig& cfg,
                                 const std::vector<std::string>& algorithms,
                                 const std::filesystem::path& out_dir) {
  ExperimentConfig exp = make_experiment_preset(preset, cfg);
  if (!algorithms.empty()) {
    if (exp.kind == ExperimentKind::LearningCurve)
      throw ConfigError("learning-curve presets always run ql; --algorithms does not apply");
    exp.algorithms = algorithms;
  }
  const ExperimentResults results = run_experiment(exp);
  write_experiment_outputs(exp, results, out_dir);

  ExperimentSummary summary;
  summary.kind = results.kind;
  summary.result_rows = results.rows.size();
  summary.curves = results.curves.size();
  summary.comparisons = results.comparisons;
  return summary;
}

}  // namespace vnfsim
