#include "ecoinfer/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"

namespace ecoinfer {

namespace {

constexpr const char* kStageHeader =
    "replica_id,stage_id,start_time_s,duration_s,flops_mlp,flops_attn,batch_size,"
    "tokens_processed,mfu_pct";

struct RunningRequest {
  int prefill = 0;
  int decode_total = 0;
  int decode_done = 0;
};

struct ReplicaTotals {
  std::int64_t iterations = 0;
  double batch_size_sum = 0.0;
};

void simulate_replica(int replica_id, std::span<const Request* const> queue,
                      const ClusterConfig& cluster, std::vector<BatchStageRecord>& out,
                      ReplicaTotals& totals) {
  const int stages = cluster.pipeline_parallel;
  std::vector<RunningRequest> running;
  std::vector<TokenWork> work;
  std::size_t next = 0;
  double clock = 0.0;

  while (next < queue.size() || !running.empty()) {
    if (running.empty() && queue[next]->arrival_time_s > clock) {
      clock = queue[next]->arrival_time_s;
    }

    work.clear();
    std::int64_t budget_used = static_cast<std::int64_t>(running.size());
    std::size_t admitted_begin = next;
    while (next < queue.size() && queue[next]->arrival_time_s <= clock &&
           running.size() + (next - admitted_begin) < static_cast<std::size_t>(cluster.batch_cap) &&
           budget_used + queue[next]->prefill_tokens <= cluster.max_tokens) {
      const Request& r = *queue[next];
      budget_used += r.prefill_tokens;
      work.push_back({r.prefill_tokens, r.prefill_tokens});
      ++next;
    }
    for (const auto& r : running) {
      work.push_back({1, static_cast<std::int64_t>(r.prefill) + r.decode_done + 1});
    }

    const StageFlops flops = flops_for_stage(cluster.model, work);
    const double stage_mlp = flops.mlp / stages;
    const double stage_attn = flops.attn / stages;
    const double bytes = stage_bytes_moved(cluster, work);
    const double duration = stage_latency(cluster, stage_mlp + stage_attn, bytes);
    const double mfu = mfu_of_stage(stage_mlp, stage_attn, duration, cluster);
    std::int64_t tokens = 0;
    for (const auto& w : work) tokens += w.new_tokens;

    for (int s = 0; s < stages; ++s) {
      out.push_back({replica_id, s, clock + s * duration, duration, stage_mlp, stage_attn,
                     static_cast<int>(work.size()), tokens, mfu});
    }
    clock += stages * duration;
    ++totals.iterations;
    totals.batch_size_sum += static_cast<double>(work.size());

    for (auto& r : running) ++r.decode_done;
    std::erase_if(running, [](const RunningRequest& r) { return r.decode_done >= r.decode_total; });
    for (std::size_t i = admitted_begin; i < next; ++i) {
      running.push_back({queue[i]->prefill_tokens, queue[i]->decode_tokens, 0});
    }
  }
}

}  // namespace

void ClusterConfig::validate() const {
  gpu.validate();
  model.validate();
  if (replicas < 1 || tensor_parallel < 1 || pipeline_parallel < 1) {
    throw ConfigError("cluster: replicas, tensor_parallel and pipeline_parallel must be >= 1");
  }
  if (batch_cap < 1) throw ConfigError("cluster: batch_cap must be >= 1");
  if (max_tokens < 2) throw ConfigError("cluster: max_tokens must be >= 2");
  if (!(roofline_efficiency > 0.0 && roofline_efficiency <= 1.0)) {
    throw ConfigError("cluster: roofline_efficiency must lie in (0, 1]");
  }
  if (!(stage_overhead_s >= 0.0) || !std::isfinite(stage_overhead_s)) {
    throw ConfigError("cluster: stage_overhead must be non-negative");
  }
}

StageFlops flops_for_stage(const ModelProfile& model, std::span<const TokenWork> batch) {
  const double d = model.d_model;
  const double kv_ratio = static_cast<double>(model.n_kv_heads) / model.n_heads;
  const double proj_per_token = 2.0 * d * (d + 2.0 * d * kv_ratio) + 2.0 * d * d;
  const double mlp_per_token = (model.gated_mlp ? 6.0 : 4.0) * d * model.d_ff;

  double tokens = 0.0;
  double token_context = 0.0;
  for (const auto& w : batch) {
    const auto n = static_cast<double>(w.new_tokens);
    tokens += n;
    token_context += n * static_cast<double>(w.context_len);
  }
  StageFlops f;
  f.mlp = model.num_layers * mlp_per_token * tokens;
  f.attn = model.num_layers * (proj_per_token * tokens + 4.0 * d * token_context);
  return f;
}

double stage_bytes_moved(const ClusterConfig& cluster, std::span<const TokenWork> batch) {
  double context_tokens = 0.0;
  for (const auto& w : batch) context_tokens += static_cast<double>(w.context_len);
  const auto& m = cluster.model;
  const double kv = context_tokens * m.kv_bytes_per_token_per_layer() * m.num_layers;
  return (m.weight_bytes() + kv) / cluster.pipeline_parallel;
}

double stage_latency(const ClusterConfig& cluster, double flops, double bytes_moved) {
  const double tp = cluster.tensor_parallel;
  const double compute = flops / (tp * cluster.roofline_efficiency * cluster.gpu.peak_flops);
  const double memory = bytes_moved / (tp * cluster.gpu.mem_bandwidth);
  return std::max(compute, memory) + cluster.stage_overhead_s;
}

double mfu_of_stage(double flops_mlp, double flops_attn, double duration_s,
                    const ClusterConfig& cluster) {
  const double capacity = cluster.gpu.peak_flops * cluster.tensor_parallel;
  const double mfu = (flops_mlp + flops_attn) / (capacity * duration_s) * 100.0;
  return std::clamp(mfu, 0.0, 100.0);
}

double mfu_of_stage(const BatchStageRecord& record, const ClusterConfig& cluster) {
  return mfu_of_stage(record.flops_mlp, record.flops_attn, record.duration_s, cluster);
}

SimResult run(std::span<const Request> requests, const ClusterConfig& cluster) {
  cluster.validate();
  if (requests.empty()) throw DataError("engine: request trace is empty");

  std::vector<std::vector<const Request*>> queues(static_cast<std::size_t>(cluster.replicas));
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const Request& r = requests[i];
    if (r.prefill_tokens < 1 || r.decode_tokens < 1) {
      throw DataError("engine: request " + std::to_string(r.id) + " has no tokens");
    }
    if (r.total_tokens() > cluster.max_tokens) {
      throw CapacityError("engine: request " + std::to_string(r.id) + " needs " +
                          std::to_string(r.total_tokens()) + " tokens, max_tokens is " +
                          std::to_string(cluster.max_tokens));
    }
    if (i > 0 && r.arrival_time_s < requests[i - 1].arrival_time_s) {
      throw DataError("engine: arrivals must be nondecreasing");
    }
    queues[i % queues.size()].push_back(&r);
  }

  SimResult result;
  ReplicaTotals totals;
  for (std::size_t rep = 0; rep < queues.size(); ++rep) {
    if (queues[rep].empty()) continue;
    simulate_replica(static_cast<int>(rep), queues[rep], cluster, result.records, totals);
  }

  auto& s = result.summary;
  s.total_requests = static_cast<std::int64_t>(requests.size());
  s.record_count = static_cast<std::int64_t>(result.records.size());
  s.iteration_count = totals.iterations;
  s.mean_batch_size = totals.batch_size_sum / static_cast<double>(totals.iterations);
  double busy = 0.0;
  double weighted_mfu = 0.0;
  for (const auto& rec : result.records) {
    s.makespan_s = std::max(s.makespan_s, rec.end_time_s());
    s.total_flops += rec.flops();
    busy += rec.duration_s;
    weighted_mfu += rec.mfu_pct * rec.duration_s;
  }
  s.mean_mfu_pct = weighted_mfu / busy;
  return result;
}

void write_stage_csv(const std::filesystem::path& path, std::span<const BatchStageRecord> records) {
  auto out = detail::open_for_write(path);
  out << kStageHeader << '\n';
  for (const auto& r : records) {
    out << r.replica_id << ',' << r.stage_id << ',' << detail::exact(r.start_time_s) << ','
        << detail::exact(r.duration_s) << ',' << detail::exact(r.flops_mlp) << ','
        << detail::exact(r.flops_attn) << ',' << r.batch_size << ',' << r.tokens_processed << ','
        << detail::exact(r.mfu_pct) << '\n';
  }
}

std::vector<BatchStageRecord> read_stage_csv(const std::filesystem::path& path) {
  detail::CsvReader reader(path);
  reader.expect_header(kStageHeader);
  std::vector<BatchStageRecord> records;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 9) reader.fail("expected 9 columns, found " + std::to_string(f.size()));
    BatchStageRecord r;
    r.replica_id = static_cast<int>(reader.to_int(f[0], "replica_id"));
    r.stage_id = static_cast<int>(reader.to_int(f[1], "stage_id"));
    r.start_time_s = reader.to_double(f[2], "start_time_s");
    r.duration_s = reader.to_double(f[3], "duration_s");
    r.flops_mlp = reader.to_double(f[4], "flops_mlp");
    r.flops_attn = reader.to_double(f[5], "flops_attn");
    r.batch_size = static_cast<int>(reader.to_int(f[6], "batch_size"));
    r.tokens_processed = reader.to_int(f[7], "tokens_processed");
    r.mfu_pct = reader.to_double(f[8], "mfu_pct");
    if (r.replica_id < 0 || r.stage_id < 0) reader.fail("negative replica or stage id");
    if (!(r.duration_s > 0.0)) reader.fail("duration_s must be positive");
    if (r.flops_mlp < 0.0 || r.flops_attn < 0.0) reader.fail("negative FLOPs");
    if (r.mfu_pct < 0.0 || r.mfu_pct > 100.0) reader.fail("mfu_pct outside [0, 100]");
    records.push_back(r);
  }
  if (records.empty()) throw DataError(path.string() + ": no stage records");
  return records;
}

void write_sim_summary(std::ostream& out, const SimSummary& s) {
  out << "makespan_s=" << detail::exact(s.makespan_s) << '\n'
      << "total_requests=" << s.total_requests << '\n'
      << "mean_batch_size=" << detail::exact(s.mean_batch_size) << '\n'
      << "stage_records=" << s.record_count << '\n'
      << "iterations=" << s.iteration_count << '\n'
      << "mean_mfu_pct=" << detail::exact(s.mean_mfu_pct) << '\n'
      << "total_flops=" << detail::exact(s.total_flops) << '\n';
}

}  // namespace ecoinfer
