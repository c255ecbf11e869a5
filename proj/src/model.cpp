#include "vnfsim/model.hpp"

#include <algorithm>
#include <string>

namespace vnfsim {

namespace {

void check_ec_index(const Scenario& sc, int ec) {
  if (ec < 0 || ec >= sc.num_ecs()) throw std::invalid_argument("EC index out of range");
}

void check_type_index(const Scenario& sc, int type) {
  if (type < 0 || type >= sc.num_types()) throw std::invalid_argument("VNF type index out of range");
}

void check_shape(const AllocationMatrix& m, const Scenario& sc) {
  if (m.rows() != sc.num_ecs() || m.cols() != sc.num_types())
    throw std::invalid_argument("allocation matrix shape does not match scenario");
}

}  // namespace

Scenario make_scenario(Topology topo, std::vector<VnfType> types) {
  if (topo.ecs.empty()) throw ConfigError("scenario needs at least one EC");
  if (types.empty()) throw ConfigError("scenario needs at least one VNF type");
  for (std::size_t k = 0; k < topo.ecs.size(); ++k) {
    const EcNode& ec = topo.ecs[k];
    if (ec.id != static_cast<int>(k) + 1) throw ConfigError("EC ids must be 1-based and contiguous");
    if (ec.cpu_capacity < 0 || ec.bw_capacity < 0) throw ConfigError("EC capacities must be non-negative");
    if (ec.hops < 1) throw ConfigError("EC hop count must be at least 1");
  }
  for (std::size_t i = 0; i < types.size(); ++i) {
    const VnfType& t = types[i];
    if (t.id != static_cast<int>(i) + 1) throw ConfigError("VNF type ids must be 1-based and contiguous");
    if (t.cpu_demand <= 0 || t.bw_demand <= 0) throw ConfigError("VNF demands must be positive");
    if (!(t.arrival_rate > 0.0) || !(t.departure_rate > 0.0))
      throw ConfigError("VNF rates must be positive");
  }

  Scenario sc;
  sc.topo = std::move(topo);
  sc.types = std::move(types);
  const int k = sc.num_ecs();
  const int i = sc.num_types();
  sc.cpu_demand.resize(i);
  sc.bw_demand.resize(i);
  sc.lambda.resize(i);
  sc.mu.resize(i);
  for (int t = 0; t < i; ++t) {
    sc.cpu_demand[t] = sc.types[t].cpu_demand;
    sc.bw_demand[t] = sc.types[t].bw_demand;
    sc.lambda[t] = sc.types[t].arrival_rate;
    sc.mu[t] = sc.types[t].departure_rate;
  }
  sc.cpu_capacity.resize(k);
  sc.bw_capacity.resize(k);
  for (int n = 0; n < k; ++n) {
    sc.cpu_capacity[n] = sc.topo.ecs[n].cpu_capacity;
    sc.bw_capacity[n] = sc.topo.ecs[n].bw_capacity;
  }
  return sc;
}

AllocationMatrix empty_allocation(const Scenario& sc) {
  return AllocationMatrix::Zero(sc.num_ecs(), sc.num_types());
}

int used_cpu(const AllocationMatrix& m, const Scenario& sc, int ec) {
  check_shape(m, sc);
  check_ec_index(sc, ec);
  return m.row(ec).dot(sc.cpu_demand.transpose());
}

int used_bw(const AllocationMatrix& m, const Scenario& sc, int ec) {
  check_shape(m, sc);
  check_ec_index(sc, ec);
  return m.row(ec).dot(sc.bw_demand.transpose());
}

int free_cpu(const AllocationMatrix& m, const Scenario& sc, int ec) {
  return sc.cpu_capacity[ec] - used_cpu(m, sc, ec);
}

int free_bw(const AllocationMatrix& m, const Scenario& sc, int ec) {
  return sc.bw_capacity[ec] - used_bw(m, sc, ec);
}

std::vector<int> feasible_ecs(const AllocationMatrix& m, const Scenario& sc, int type) {
  check_shape(m, sc);
  check_type_index(sc, type);
  std::vector<int> out;
  for (int ec = 0; ec < sc.num_ecs(); ++ec) {
    if (free_cpu(m, sc, ec) >= sc.cpu_demand[type] && free_bw(m, sc, ec) >= sc.bw_demand[type])
      out.push_back(ec);
  }
  return out;
}

void validate_allocation(const AllocationMatrix& m, const Scenario& sc) {
  check_shape(m, sc);
  if ((m.array() < 0).any()) throw std::domain_error("allocation count is negative");
  for (int ec = 0; ec < sc.num_ecs(); ++ec) {
    if (used_cpu(m, sc, ec) > sc.cpu_capacity[ec])
      throw std::domain_error("CPU capacity exceeded on EC " + std::to_string(ec + 1));
    if (used_bw(m, sc, ec) > sc.bw_capacity[ec])
      throw std::domain_error("bandwidth capacity exceeded on EC " + std::to_string(ec + 1));
  }
}

AllocationMatrix apply_placement(AllocationMatrix m, const Scenario& sc, int type, int ec) {
  check_shape(m, sc);
  check_type_index(sc, type);
  check_ec_index(sc, ec);
  if (free_cpu(m, sc, ec) < sc.cpu_demand[type] || free_bw(m, sc, ec) < sc.bw_demand[type])
    throw std::domain_error("placement infeasible on EC " + std::to_string(ec + 1));
  m(ec, type) += 1;
  return m;
}

AllocationMatrix apply_departure(AllocationMatrix m, const Scenario& sc, int type, int ec) {
  check_shape(m, sc);
  check_type_index(sc, type);
  check_ec_index(sc, ec);
  if (m(ec, type) < 1)
    throw std::domain_error("no instance of the type on EC " + std::to_string(ec + 1));
  m(ec, type) -= 1;
  return m;
}

}  // namespace vnfsim
