#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ecoinfer/profiles.hpp"
#include "ecoinfer/workload.hpp"

namespace ecoinfer {

enum class SchedulerKind { VllmLike };

struct ClusterConfig {
  GpuProfile gpu;
  ModelProfile model;
  int replicas = 1;
  int tensor_parallel = 1;
  int pipeline_parallel = 1;
  int batch_cap = 128;
  // Per-request token limit; also the per-iteration token budget that gates
  // admission of new prefills.
  int max_tokens = 4096;
  SchedulerKind scheduler = SchedulerKind::VllmLike;
  double roofline_efficiency = 0.46;
  double stage_overhead_s = 0.0;

  // G = R * TP * PP
  int gpu_count() const { return replicas * tensor_parallel * pipeline_parallel; }

  void validate() const;
};

// One scheduler iteration on one pipeline stage of one replica.
struct BatchStageRecord {
  int replica_id = 0;
  int stage_id = 0;
  double start_time_s = 0.0;
  double duration_s = 0.0;
  double flops_mlp = 0.0;
  double flops_attn = 0.0;
  int batch_size = 0;
  std::int64_t tokens_processed = 0;
  double mfu_pct = 0.0;

  double end_time_s() const { return start_time_s + duration_s; }
  double flops() const { return flops_mlp + flops_attn; }

  friend bool operator==(const BatchStageRecord&, const BatchStageRecord&) = default;
};

struct SimSummary {
  double makespan_s = 0.0;
  std::int64_t total_requests = 0;
  double mean_batch_size = 0.0;       // averaged over iterations
  std::int64_t record_count = 0;
  std::int64_t iteration_count = 0;
  double mean_mfu_pct = 0.0;          // busy-time weighted
  double total_flops = 0.0;
};

struct SimResult {
  std::vector<BatchStageRecord> records;  // sorted by (replica, start, stage)
  SimSummary summary;
};

// Work contributed by one request to one iteration: `new_tokens` processed
// against a KV context of `context_len` tokens (including the new ones).
struct TokenWork {
  std::int64_t new_tokens = 1;
  std::int64_t context_len = 1;
};

struct StageFlops {
  double mlp = 0.0;
  double attn = 0.0;
  double total() const { return mlp + attn; }
};

// Multiply-add counted as two FLOPs. Per layer and request:
//   attention projections  2 n d (d + 2 d kv/h) + 2 n d^2
//   scores and values      4 n c d
//   gated MLP              6 n d d_ff   (4 n d d_ff for a plain MLP)
StageFlops flops_for_stage(const ModelProfile& model, std::span<const TokenWork> batch);

// Bytes one pipeline stage moves for the batch: its slice of the weights and
// the KV cache read for every context token.
double stage_bytes_moved(const ClusterConfig& cluster, std::span<const TokenWork> batch);

// Roofline surrogate: max(compute, memory) + fixed overhead.
double stage_latency(const ClusterConfig& cluster, double flops, double bytes_moved);

// Achieved FLOPs over capacity (peak * TP) for the stage, in percent, clamped
// to [0, 100].
double mfu_of_stage(double flops_mlp, double flops_attn, double duration_s,
                    const ClusterConfig& cluster);
double mfu_of_stage(const BatchStageRecord& record, const ClusterConfig& cluster);

// Continuous-batching simulation. Requests go round-robin to replicas; each
// replica admits FCFS while batch_cap and the token budget allow, runs one
// prefill chunk per admitted request and one decode token per running
// request per iteration. Throws CapacityError for requests over max_tokens.
SimResult run(std::span<const Request> requests, const ClusterConfig& cluster);

// CSV header:
// replica_id,stage_id,start_time_s,duration_s,flops_mlp,flops_attn,batch_size,tokens_processed,mfu_pct
void write_stage_csv(const std::filesystem::path& path, std::span<const BatchStageRecord> records);
std::vector<BatchStageRecord> read_stage_csv(const std::filesystem::path& path);

void write_sim_summary(std::ostream& out, const SimSummary& summary);

}  // namespace ecoinfer
