#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "vnfsim/bestfit.hpp"
#include "vnfsim/experiment.hpp"
#include "vnfsim/model.hpp"
#include "vnfsim/rng.hpp"

using namespace vnfsim;

namespace {

Scenario default_scenario() { return table1_config().scenario; }

}  // namespace

TEST_CASE("score collapses to proximity on an idle network") {
  const Scenario sc = default_scenario();
  const AllocationMatrix m = empty_allocation(sc);
  CHECK(bestfit_score(m, sc, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bestfit_score(m, sc, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("score blends free cpu and hop distance by bandwidth usage") {
  // one EC, capacities (60 cores, 200 Mbps), two hops away; a (10, 100)
  // instance leaves a = 100/200 and free cpu 50: 0.5*0.5 + 0.5*0.5
  Topology topo{{{1, 60, 200, 2}}};
  const Scenario sc = make_scenario(topo, {{1, 10, 100, 1.0, 1.0}});
  const AllocationMatrix m = apply_placement(empty_allocation(sc), sc, 0, 0);
  CHECK(bestfit_score(m, sc, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("score on the default network after one wide placement") {
  const Scenario sc = default_scenario();
  const AllocationMatrix m = apply_placement(empty_allocation(sc), sc, 0, 0);
  // a = 300/1400, free cpu 3 of EC1, one hop
  const double expected = (300.0 / 1400.0) * (3.0 / 100.0) + (1100.0 / 1400.0) * 1.0;
  CHECK(bestfit_score(m, sc, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(bestfit_score(m, sc, 0) == doctest::Approx(0.79214).epsilon(1e-4));
}

TEST_CASE("zero total bandwidth cannot be scored") {
  Topology topo{{{1, 4, 0, 1}}};
  const Scenario sc = make_scenario(topo, {{1, 1, 1, 1.0, 1.0}});
  CHECK_THROWS_AS(bestfit_score(empty_allocation(sc), sc, 0), std::domain_error);
  CHECK_THROWS_AS(bestfit_score(empty_allocation(default_scenario()), default_scenario(), 5),
                  std::invalid_argument);
}

TEST_CASE("placement rejects when nothing fits and takes the only fit") {
  const Scenario sc = default_scenario();
  Rng rng(1);

  AllocationMatrix full = empty_allocation(sc);
  full(0, 0) = 3;   // EC1: 3 cores and 900 Mbps used
  full(1, 0) = 1;   // EC2: 300 of 400 Mbps used
  // a type-1 request needs 300 Mbps; EC1 has 100 left, EC2 has 100 left
  CHECK(bestfit_place(full, sc, 0, rng) == Action::reject());

  // EC2 keeps room for type-2 (3 cores, 50 Mbps) while EC1 is cpu-bound
  AllocationMatrix one = empty_allocation(sc);
  one(0, 1) = 1;  // EC1 at 3 of 4 cores
  one(0, 0) = 1;  // plus one core: EC1 full on cpu
  CHECK(bestfit_place(one, sc, 1, rng) == Action::place(1));
}

TEST_CASE("identical candidates are drawn uniformly") {
  Topology topo{{{1, 8, 800, 1}, {2, 8, 800, 1}}};
  const Scenario sc = make_scenario(topo, {{1, 1, 100, 1.0, 1.0}});
  const AllocationMatrix m = empty_allocation(sc);

  Rng rng(424242);
  int picks[2] = {0, 0};
  for (int i = 0; i < 10'000; ++i) {
    const Action a = bestfit_place(m, sc, 0, rng);
    REQUIRE(a.is_place());
    ++picks[a.ec()];
  }
  CHECK(picks[0] + picks[1] == 10'000);
  CHECK(std::abs(picks[0] - 5000) <= 300);
}

TEST_CASE("distinct availability breaks equal scores deterministically") {
  // both ECs idle: scores tie at 1.0, but the resource pairs differ, so the
  // index rule decides and the rng is never consulted
  const Scenario sc = default_scenario();
  const AllocationMatrix m = empty_allocation(sc);

  Rng rng(99);
  CHECK(bestfit_place(m, sc, 0, rng) == Action::place(0));

  Rng untouched(99);
  CHECK(rng.uniform01() == untouched.uniform01());
}

TEST_CASE("on an unused network ranking follows hop count then index") {
  Topology topo{{{1, 10, 100, 2}, {2, 8, 200, 1}, {3, 6, 300, 1}}};
  const Scenario sc = make_scenario(topo, {{1, 1, 10, 1.0, 1.0}});
  Rng rng(5);
  CHECK(bestfit_place(empty_allocation(sc), sc, 0, rng) == Action::place(1));
}

TEST_CASE("the winner always has room") {
  const Scenario sc = default_scenario();
  Rng rng(7);
  Rng shaper(8);

  for (int round = 0; round < 500; ++round) {
    AllocationMatrix m = empty_allocation(sc);
    for (int step = 0; step < 5; ++step) {
      const int type = static_cast<int>(shaper.uniform_int(2));
      const auto fits = feasible_ecs(m, sc, type);
      if (fits.empty()) break;
      m = apply_placement(m, sc, type, fits[shaper.uniform_int(fits.size())]);
    }
    for (int type = 0; type < sc.num_types(); ++type) {
      const Action a = bestfit_place(m, sc, type, rng);
      const auto fits = feasible_ecs(m, sc, type);
      if (fits.empty()) {
        CHECK(a.is_reject());
      } else {
        REQUIRE(a.is_place());
        CHECK(std::find(fits.begin(), fits.end(), a.ec()) != fits.end());
      }
    }
  }
}

TEST_CASE("ranking prefers lighter links, then cpu headroom") {
  // EC1 carries 600 of the 1400 network Mbps, EC2 is idle: proximity term
  // intact on EC2, weighted down on EC1
  const Scenario sc = default_scenario();
  AllocationMatrix m = empty_allocation(sc);
  m(0, 0) = 2;
  CHECK(bestfit_score(m, sc, 1) > bestfit_score(m, sc, 0));
  Rng rng(3);
  CHECK(bestfit_place(m, sc, 0, rng) == Action::place(1));

  // equal link usage on both: the free-cpu term decides
  Topology topo{{{1, 20, 100, 1}, {2, 30, 100, 1}}};
  const Scenario cpu_sc = make_scenario(topo, {{1, 1, 10, 1.0, 1.0}});
  AllocationMatrix load = empty_allocation(cpu_sc);
  load(0, 0) = 9;
  load(1, 0) = 9;
  CHECK(bestfit_score(load, cpu_sc, 1) > bestfit_score(load, cpu_sc, 0));
  CHECK(bestfit_place(load, cpu_sc, 0, rng) == Action::place(1));
}
