#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "vnfsim/mdp.hpp"
#include "vnfsim/model.hpp"
#include "vnfsim/trace.hpp"

namespace vnfsim::testing {

// Small asymmetric scenarios sized for exhaustive cross-checks. Capacities
// and rates are deliberately unequal so optimal actions are unique and
// argmax comparisons cannot pass by accident of symmetry.

inline Scenario tiny_1ec_1type() {
  Topology topo{{{1, 2, 1000, 1}}};
  return make_scenario(topo, {{1, 1, 1, 3.0, 1.0}});
}

inline Scenario tiny_2ec_1type() {
  Topology topo{{{1, 2, 1000, 1}, {2, 1, 1000, 1}}};
  return make_scenario(topo, {{1, 1, 1, 2.0, 1.0}});
}

inline Scenario tiny_1ec_2type() {
  Topology topo{{{1, 4, 100, 1}}};
  return make_scenario(topo, {{1, 1, 10, 3.0, 1.0}, {2, 3, 20, 2.0, 0.5}});
}

inline Scenario tiny_2ec_2type() {
  Topology topo{{{1, 2, 300, 1}, {2, 3, 150, 1}}};
  return make_scenario(topo, {{1, 1, 100, 3.0, 1.0}, {2, 2, 50, 2.0, 0.5}});
}

struct RecordSpec {
  int type = 0;  // 0-based
  double gap = 0.0;
  double holding = 0.0;
};

inline Trace make_trace(const Scenario& sc, const std::vector<RecordSpec>& specs,
                        std::uint64_t seed = 0) {
  Trace t;
  t.seed = seed;
  for (int i = 0; i < sc.num_types(); ++i) {
    t.lambda.push_back(sc.lambda[i]);
    t.mu.push_back(sc.mu[i]);
  }
  int seq = 1;
  for (const RecordSpec& r : specs) t.records.push_back({seq++, r.type, r.gap, r.holding});
  return t;
}

// Independent dynamic-programming oracles. Both recompute rewards and
// successor distributions straight from transitions() so they share no code
// with the iterative solver they check.

struct ViOracle {
  std::vector<Action> actions;
  Eigen::VectorXd values;
  int iterations = 0;
};

// Jacobi value iteration on a fresh copy each pass (the solver under test
// sweeps in place), run until the sup-norm change drops below tol.
inline ViOracle value_iteration_oracle(const StateSpace& space, const Scenario& sc, double gamma,
                                       double tol, int max_iters = 1'000'000) {
  const int n = space.size();
  struct Arm {
    Action action;
    double reward;
    std::vector<std::pair<int, double>> succ;
  };
  std::vector<std::vector<Arm>> arms(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    for (const Action a : admissible_actions(space.states[static_cast<std::size_t>(s)], sc)) {
      Arm arm{a, a.is_place() ? 1.0 : 0.0, {}};
      for (const auto& [next, p] : transitions(space.states[static_cast<std::size_t>(s)], a, sc)) {
        const int id = space.id_of(next.alloc, next.event);
        if (id < 0) throw std::logic_error("oracle: successor outside the state space");
        arm.succ.emplace_back(id, p);
      }
      arms[static_cast<std::size_t>(s)].push_back(std::move(arm));
    }
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  ViOracle out;
  for (out.iterations = 1; out.iterations <= max_iters; ++out.iterations) {
    Eigen::VectorXd next(n);
    for (int s = 0; s < n; ++s) {
      double best = -1e300;
      for (const Arm& arm : arms[static_cast<std::size_t>(s)]) {
        double q = arm.reward;
        for (const auto& [id, p] : arm.succ) q += gamma * p * v[id];
        if (q > best) best = q;
      }
      next[s] = best;
    }
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (delta <= tol) break;
  }

  out.values = v;
  out.actions.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto& options = arms[static_cast<std::size_t>(s)];
    Action best_a = options.front().action;
    double best_q = -1e300;
    for (const Arm& arm : options) {
      double q = arm.reward;
      for (const auto& [id, p] : arm.succ) q += gamma * p * v[id];
      if (q > best_q) {  // strict: first admissible action wins ties
        best_q = q;
        best_a = arm.action;
      }
    }
    out.actions.push_back(best_a);
  }
  return out;
}

// Exact fixed-policy values via the linear system (I - gamma * P_pi) v = r_pi.
inline Eigen::VectorXd linear_solve_values(const Policy& policy, const StateSpace& space,
                                           const Scenario& sc, double gamma) {
  const int n = space.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    const Action act = policy.actions[static_cast<std::size_t>(s)];
    b[s] = act.is_place() ? 1.0 : 0.0;
    for (const auto& [next, p] : transitions(space.states[static_cast<std::size_t>(s)], act, sc)) {
      const int id = space.id_of(next.alloc, next.event);
      if (id < 0) throw std::logic_error("oracle: successor outside the state space");
      a(s, id) -= gamma * p;
    }
  }
  return a.partialPivLu().solve(b);
}

}  // namespace vnfsim::testing
