#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vnfsim/errors.hpp"

namespace vnfsim {

/// One VNF type: per-instance resource demand plus the Poisson arrival rate
/// and the per-instance departure rate.
struct VnfType {
  int id = 0;  // 1-based, contiguous
  int cpu_demand = 0;
  int bw_demand = 0;
  double arrival_rate = 0.0;    // lambda
  double departure_rate = 0.0;  // mu
};

/// Edge-compute node: CPU capacity, bandwidth capacity of the link reaching
/// it, and hop count from the request entry point.
struct EcNode {
  int id = 0;  // 1-based, contiguous
  int cpu_capacity = 0;
  int bw_capacity = 0;
  int hops = 1;
};

struct Topology {
  std::vector<EcNode> ecs;
  int node_count() const { return static_cast<int>(ecs.size()); }
};

enum class EventKind { Arrival, Departure };

/// Pending event half of a decision state: one VNF type arriving or one
/// hosted instance of a type departing. `vnf_type` is a 0-based index.
struct Event {
  EventKind kind = EventKind::Arrival;
  int vnf_type = 0;
  friend bool operator==(const Event&, const Event&) = default;
};

/// Placement decision, encoded as one int shared by artifacts, Q-table rows
/// and policies: -1 void (departures), 0 reject, 1..K place at EC `code - 1`.
struct Action {
  int code = 0;

  static Action reject() { return {0}; }
  static Action place(int ec) { return {ec + 1}; }
  static Action void_action() { return {-1}; }

  bool is_reject() const { return code == 0; }
  bool is_place() const { return code > 0; }
  bool is_void() const { return code < 0; }
  /// Hosting EC as a 0-based index; only meaningful when is_place().
  int ec() const { return code - 1; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// Active-instance counts: one row per EC, one column per VNF type.
using AllocationMatrix = Eigen::MatrixXi;

/// Topology and VNF catalogue with per-column data cached as Eigen vectors.
/// Every solver and the episode harness operate on this bundle.
struct Scenario {
  Topology topo;
  std::vector<VnfType> types;

  Eigen::VectorXi cpu_demand;    // per type
  Eigen::VectorXi bw_demand;     // per type
  Eigen::VectorXd lambda;        // per type
  Eigen::VectorXd mu;            // per type
  Eigen::VectorXi cpu_capacity;  // per EC
  Eigen::VectorXi bw_capacity;   // per EC

  int num_ecs() const { return topo.node_count(); }
  int num_types() const { return static_cast<int>(types.size()); }
};

/// Validates ids, demands, capacities and rates; throws ConfigError.
Scenario make_scenario(Topology topo, std::vector<VnfType> types);

AllocationMatrix empty_allocation(const Scenario& sc);

int used_cpu(const AllocationMatrix& m, const Scenario& sc, int ec);
int used_bw(const AllocationMatrix& m, const Scenario& sc, int ec);
int free_cpu(const AllocationMatrix& m, const Scenario& sc, int ec);
int free_bw(const AllocationMatrix& m, const Scenario& sc, int ec);

/// 0-based indices of ECs with enough free CPU and bandwidth for one more
/// instance of `type`, in ascending order.
std::vector<int> feasible_ecs(const AllocationMatrix& m, const Scenario& sc, int type);

/// Throws std::domain_error when a count is negative or a capacity is
/// exceeded; shape mismatches throw std::invalid_argument.
void validate_allocation(const AllocationMatrix& m, const Scenario& sc);

/// Returns m with one instance of `type` added on `ec`; the placement must
/// be feasible (std::domain_error otherwise).
AllocationMatrix apply_placement(AllocationMatrix m, const Scenario& sc, int type, int ec);

/// Returns m with one instance of `type` removed from `ec`; the count must
/// be positive (std::domain_error otherwise).
AllocationMatrix apply_departure(AllocationMatrix m, const Scenario& sc, int type, int ec);

inline bool alloc_equal(const AllocationMatrix& a, const AllocationMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace vnfsim
