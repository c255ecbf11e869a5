#include "vnfsim/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <string>

#include "vnfsim/errors.hpp"
#include "vnfsim/rng.hpp"

namespace vnfsim {

using nlohmann::json;

Trace generate_trace(const std::vector<VnfType>& types, int n_requests, std::uint64_t seed) {
  if (types.empty()) throw std::invalid_argument("generate_trace: no VNF types");
  if (n_requests < 1) throw std::invalid_argument("generate_trace: n_requests must be positive");

  Trace trace;
  trace.seed = seed;
  double total_lambda = 0.0;
  for (const VnfType& t : types) {
    if (!(t.arrival_rate > 0.0) || !(t.departure_rate > 0.0))
      throw std::invalid_argument("generate_trace: rates must be positive");
    trace.lambda.push_back(t.arrival_rate);
    trace.mu.push_back(t.departure_rate);
    total_lambda += t.arrival_rate;
  }

  Rng rng(seed);
  trace.records.reserve(static_cast<std::size_t>(n_requests));
  for (int seq = 1; seq <= n_requests; ++seq) {
    TraceRecord rec;
    rec.seq = seq;
    rec.inter_arrival = rng.exponential(total_lambda);
    // Type selection by cumulative rate walk; u < 1 guarantees a hit, the
    // fallback only guards float dust on the last bucket.
    const double u = rng.uniform01() * total_lambda;
    double acc = 0.0;
    rec.vnf_type = static_cast<int>(types.size()) - 1;
    for (std::size_t i = 0; i < types.size(); ++i) {
      acc += types[i].arrival_rate;
      if (u < acc) {
        rec.vnf_type = static_cast<int>(i);
        break;
      }
    }
    rec.holding_time = rng.exponential(types[static_cast<std::size_t>(rec.vnf_type)].departure_rate);
    trace.records.push_back(rec);
  }
  return trace;
}

std::vector<Trace> generate_file_set(const std::vector<VnfType>& types, int n_files,
                                     int n_requests, std::uint64_t base_seed) {
  if (n_files < 0) throw std::invalid_argument("generate_file_set: n_files must be non-negative");
  std::vector<Trace> out;
  out.reserve(static_cast<std::size_t>(n_files));
  for (int f = 0; f < n_files; ++f)
    out.push_back(generate_trace(types, n_requests, base_seed + static_cast<std::uint64_t>(f)));
  return out;
}

void write_trace_jsonl(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  json header;
  header["header"]["seed"] = trace.seed;
  header["header"]["n"] = trace.records.size();
  header["header"]["rates"]["lambda"] = trace.lambda;
  header["header"]["rates"]["mu"] = trace.mu;
  out << header.dump() << '\n';

  for (const TraceRecord& rec : trace.records) {
    json line;
    line["seq"] = rec.seq;
    line["type"] = rec.vnf_type + 1;  // 1-based on disk
    line["inter_arrival"] = rec.inter_arrival;
    line["holding"] = rec.holding_time;
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Trace read_trace_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path.string());

  Trace trace;
  std::size_t expected = 0;
  try {
    const json header = json::parse(line);
    const json& h = header.at("header");
    trace.seed = h.at("seed").get<std::uint64_t>();
    expected = h.at("n").get<std::size_t>();
    trace.lambda = h.at("rates").at("lambda").get<std::vector<double>>();
    trace.mu = h.at("rates").at("mu").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw IoError("bad trace header in " + path.string() + ": " + e.what());
  }
  if (trace.lambda.empty() || trace.lambda.size() != trace.mu.size())
    throw IoError("bad trace rates in " + path.string());

  const int num_types = static_cast<int>(trace.lambda.size());
  int seq = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRecord rec;
    try {
      const json j = json::parse(line);
      rec.seq = j.at("seq").get<int>();
      rec.vnf_type = j.at("type").get<int>() - 1;
      rec.inter_arrival = j.at("inter_arrival").get<double>();
      rec.holding_time = j.at("holding").get<double>();
    } catch (const json::exception& e) {
      throw IoError("bad trace record in " + path.string() + ": " + e.what());
    }
    ++seq;
    if (rec.seq != seq) throw IoError("trace records out of order in " + path.string());
    if (rec.vnf_type < 0 || rec.vnf_type >= num_types)
      throw IoError("trace record type out of range in " + path.string());
    if (!(rec.inter_arrival >= 0.0) || !(rec.holding_time >= 0.0))
      throw IoError("trace record times must be non-negative in " + path.string());
    trace.records.push_back(rec);
  }
  if (trace.records.size() != expected)
    throw IoError("trace record count does not match header in " + path.string());
  return trace;
}

std::vector<Trace> read_trace_dir(const std::filesystem::path& dir, const std::string& prefix) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind(prefix, 0) == 0 && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Trace> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_trace_jsonl(f));
  return out;
}

}  // namespace vnfsim
