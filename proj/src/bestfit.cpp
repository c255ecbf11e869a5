#include "vnfsim/bestfit.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vnfsim {

double bestfit_score(const AllocationMatrix& m, const Scenario& sc, int ec) {
  const long long total_bw = sc.bw_capacity.cast<long long>().sum();
  if (total_bw <= 0) throw std::domain_error("total network bandwidth must be positive");
  const double a = static_cast<double>(used_bw(m, sc, ec)) / static_cast<double>(total_bw);
  return a * static_cast<double>(free_cpu(m, sc, ec)) / 100.0 +
         (1.0 - a) * (1.0 / static_cast<double>(sc.topo.ecs[static_cast<std::size_t>(ec)].hops));
}

Action bestfit_place(const AllocationMatrix& m, const Scenario& sc, int type, Rng& rng) {
  const std::vector<int> feasible = feasible_ecs(m, sc, type);
  if (feasible.empty()) return Action::reject();
  if (feasible.size() == 1) return Action::place(feasible.front());

  bool identical = true;
  const std::pair<int, int> first{free_cpu(m, sc, feasible.front()), free_bw(m, sc, feasible.front())};
  for (std::size_t i = 1; i < feasible.size() && identical; ++i) {
    identical = std::pair<int, int>{free_cpu(m, sc, feasible[i]), free_bw(m, sc, feasible[i])} == first;
  }
  if (identical) {
    const auto pick = rng.uniform_int(static_cast<std::uint64_t>(feasible.size()));
    return Action::place(feasible[static_cast<std::size_t>(pick)]);
  }

  int best = feasible.front();
  double best_score = bestfit_score(m, sc, best);
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    const double score = bestfit_score(m, sc, feasible[i]);
    if (score > best_score) {  // strict: ties keep the lowest EC index
      best_score = score;
      best = feasible[i];
    }
  }
  return Action::place(best);
}

}  // namespace vnfsim
