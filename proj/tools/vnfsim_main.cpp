#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vnfsim/cli.hpp"
#include "vnfsim/errors.hpp"
#include "vnfsim/util.hpp"

namespace {

using namespace vnfsim;

struct CommonOpts {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool out_required = true) {
  cmd->add_option("--config", opts.config, "Scenario/config JSON file")->required();
  cmd->add_option("--out", opts.out, "Output directory")->required(out_required);
  cmd->add_option("--set", opts.sets,
                  "Override a config field, e.g. --set ql.alpha=0.9 (repeatable)");
  cmd->add_option("--seed", opts.seed, "Shorthand for --set ql.seed=N")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
}

FullConfig load_for(const CommonOpts& opts) {
  std::vector<std::string> sets = opts.sets;
  if (opts.seed_given) sets.push_back("ql.seed=" + std::to_string(opts.seed));
  return load_config_with_overrides(opts.config, sets);
}

void print_comparisons(const std::vector<AlgorithmComparison>& comparisons) {
  for (const AlgorithmComparison& cmp : comparisons) {
    std::cout << "compare sweep_value=" << fmt_double(cmp.sweep_value);
    for (const SummaryRow& s : cmp.per_algorithm)
      std::cout << ' ' << s.algorithm << "_mean=" << fmt_double(s.mean) << " " << s.algorithm
                << "_std=" << fmt_double(s.stddev);
    if (cmp.has_ql_minus_pi) std::cout << " ql_minus_pi=" << fmt_double(cmp.ql_minus_pi);
    if (cmp.has_bf_minus_ql) std::cout << " bf_minus_ql=" << fmt_double(cmp.bf_minus_ql);
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "VNF placement on edge networks: exact policy iteration, tabular Q-learning and "
      "weighted best-fit, benchmarked on Poisson request traces"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  CLI::App* gen = app.add_subcommand("gen-traces", "Generate seeded train/eval request traces");
  add_common(gen, gen_opts);

  CommonOpts pi_opts;
  CLI::App* solve = app.add_subcommand("solve-pi", "Solve the exact MDP with policy iteration");
  add_common(solve, pi_opts);

  CommonOpts ql_opts;
  std::string ql_traces;
  CLI::App* train = app.add_subcommand("train-ql", "Train the tabular Q-learning agent");
  add_common(train, ql_opts);
  train->add_option("--traces", ql_traces, "Directory holding train_*.jsonl")->required();

  CommonOpts eval_opts;
  std::string eval_traces;
  std::string eval_policy;
  std::string eval_qtable;
  std::string eval_algorithms;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Replay eval traces through the algorithms");
  add_common(evaluate, eval_opts);
  evaluate->add_option("--traces", eval_traces, "Directory holding eval_*.jsonl")->required();
  evaluate->add_option("--policy", eval_policy, "policy.json from solve-pi");
  evaluate->add_option("--qtable", eval_qtable, "qtable.json from train-ql");
  evaluate->add_option("--algorithms", eval_algorithms,
                       "Comma-separated subset of pi,ql,bestfit (default: inferred)");

  CommonOpts exp_opts;
  std::string exp_name;
  std::string exp_algorithms;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a named sweep or curve preset");
  experiment->add_option("name", exp_name, "Preset: arrival_rate, capacity, ec_heterogeneity, "
                                           "demand_heterogeneity, alpha_gamma, eps_decay")
      ->required();
  add_common(experiment, exp_opts);
  experiment->add_option("--algorithms", exp_algorithms,
                         "Comma-separated subset of pi,ql,bestfit (sweep presets only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    if (*gen) {
      const FullConfig cfg = load_for(gen_opts);
      const GenTracesSummary s = cmd_gen_traces(cfg, gen_opts.out);
      std::cout << "wrote " << s.n_train << " train and " << s.n_eval << " eval traces of "
                << s.n_requests << " requests to " << gen_opts.out << '\n';
    } else if (*solve) {
      const FullConfig cfg = load_for(pi_opts);
      const SolvePiSummary s = cmd_solve_pi(cfg, pi_opts.out);
      std::cout << "states=" << s.stats.num_states << " iterations=" << s.stats.iterations
                << " eval_sweeps=" << s.stats.eval_sweeps
                << " bellman_residual=" << fmt_double(s.stats.bellman_residual)
                << " reject_with_feasible=" << s.stats.reject_with_feasible << '\n';
      std::cout << "policy written to " << s.policy_path.string() << '\n';
    } else if (*train) {
      const FullConfig cfg = load_for(ql_opts);
      const TrainQlSummary s = cmd_train_ql(cfg, ql_traces, ql_opts.out);
      std::cout << "episodes=" << s.episodes << " states_seen=" << s.states_seen
                << " final_avg_reward=" << fmt_double(s.final_avg_reward) << '\n';
      std::cout << "q-table written to " << s.qtable_path.string() << '\n';
    } else if (*evaluate) {
      const FullConfig cfg = load_for(eval_opts);
      std::vector<std::string> algorithms;
      if (!eval_algorithms.empty()) {
        std::string token;
        for (char c : eval_algorithms + ",") {
          if (c == ',') {
            if (!token.empty()) algorithms.push_back(token);
            token.clear();
          } else {
            token += c;
          }
        }
      }
      std::optional<std::filesystem::path> policy;
      std::optional<std::filesystem::path> qtable;
      if (!eval_policy.empty()) policy = eval_policy;
      if (!eval_qtable.empty()) qtable = eval_qtable;
      const EvaluateSummary s =
          cmd_evaluate(cfg, policy, qtable, algorithms, eval_traces, eval_opts.out);
      std::cout << "evaluated " << s.traces << " traces\n";
      for (const SummaryRow& row : s.summary)
        std::cout << row.algorithm << " mean_rejection=" << fmt_double(row.mean)
                  << " std=" << fmt_double(row.stddev) << " n=" << row.n << '\n';
      print_comparisons(s.comparisons);
    } else if (*experiment) {
      const FullConfig cfg = load_for(exp_opts);
      std::vector<std::string> algorithms;
      if (!exp_algorithms.empty()) {
        std::string token;
        for (char c : exp_algorithms + ",") {
          if (c == ',') {
            if (!token.empty()) algorithms.push_back(token);
            token.clear();
          } else {
            token += c;
          }
        }
      }
      const ExperimentSummary s = cmd_experiment(exp_name, cfg, algorithms, exp_opts.out);
      if (s.kind == ExperimentKind::RejectionSweep)
        std::cout << "wrote " << s.result_rows << " result rows to " << exp_opts.out << '\n';
      else
        std::cout << "wrote " << s.curves << " learning curves to " << exp_opts.out << '\n';
      print_comparisons(s.comparisons);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ScenarioTooLargeError& e) {
    std::cerr << "scenario too large: " << e.what() << '\n';
    return 3;
  } catch (const ArtifactMismatchError& e) {
    std::cerr << "artifact mismatch: " << e.what() << '\n';
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  // Timing goes to stdout only; artifacts must stay byte-identical across runs.
  std::cout << "wall_time_s=" << fmt_double(elapsed.count()) << '\n';
  return 0;
}
