#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vnfsim/model.hpp"

namespace vnfsim {

/// One request of the merged arrival stream. `inter_arrival` is the gap to
/// the previous arrival (the first gap is measured from time 0) and
/// `holding_time` is how long the instance stays if the request is accepted.
struct TraceRecord {
  int seq = 0;       // 1-based position in the stream
  int vnf_type = 0;  // 0-based type index
  double inter_arrival = 0.0;
  double holding_time = 0.0;
};

struct Trace {
  std::uint64_t seed = 0;
  std::vector<double> lambda;  // per-type arrival rates the trace was drawn from
  std::vector<double> mu;      // per-type departure rates
  std::vector<TraceRecord> records;
};

/// Draws `n_requests` arrivals from the merged Poisson stream: gaps are
/// Exp(sum lambda), the type is chosen with probability lambda_i / sum lambda,
/// and the holding time is Exp(mu_type). Consumption order per record is
/// gap, type, holding, so traces are reproducible from the seed alone.
Trace generate_trace(const std::vector<VnfType>& types, int n_requests, std::uint64_t seed);

/// Traces seeded base_seed, base_seed + 1, ...
std::vector<Trace> generate_file_set(const std::vector<VnfType>& types, int n_files,
                                     int n_requests, std::uint64_t base_seed);

/// JSONL layout: a header object first, then one record object per line.
void write_trace_jsonl(const Trace& trace, const std::filesystem::path& path);

/// Parses and validates a trace file; round-trips doubles bit-exactly.
Trace read_trace_jsonl(const std::filesystem::path& path);

/// Sorted train_*.jsonl or eval_*.jsonl files under `dir`.
std::vector<Trace> read_trace_dir(const std::filesystem::path& dir, const std::string& prefix);

}  // namespace vnfsim
