#include "ecoinfer/power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecoinfer/error.hpp"

namespace ecoinfer {

double power_of_mfu(const GpuProfile& gpu, double mfu) {
  const double u = std::clamp(mfu, 0.0, gpu.mfu_sat);
  if (u >= gpu.mfu_sat) return gpu.p_max_w;
  return gpu.p_idle_w + (gpu.p_max_w - gpu.p_idle_w) * std::pow(u / gpu.mfu_sat, gpu.gamma);
}

std::vector<PowerSample> stages_to_power(std::span<const BatchStageRecord> records,
                                         const ClusterConfig& cluster,
                                         const PowerOptions& options) {
  const int replicas = cluster.replicas;
  const int stages = cluster.pipeline_parallel;
  const double tp = cluster.tensor_parallel;
  const double idle_w = cluster.gpu.p_idle_w * tp;

  std::vector<std::vector<const BatchStageRecord*>> groups(
      static_cast<std::size_t>(replicas * stages));
  double horizon = 0.0;
  for (const auto& rec : records) {
    if (rec.replica_id < 0 || rec.replica_id >= replicas || rec.stage_id < 0 ||
        rec.stage_id >= stages) {
      throw DataError("power: record references replica " + std::to_string(rec.replica_id) +
                      " stage " + std::to_string(rec.stage_id) + " outside the " +
                      std::to_string(replicas) + "x" + std::to_string(stages) + " topology");
    }
    groups[static_cast<std::size_t>(rec.replica_id * stages + rec.stage_id)].push_back(&rec);
    horizon = std::max(horizon, rec.end_time_s());
  }
  if (options.horizon_s) horizon = std::max(horizon, *options.horizon_s);

  std::vector<PowerSample> samples;
  samples.reserve(records.size() * (options.idle_fill ? 2 : 1) + groups.size());
  for (auto& group : groups) {
    std::stable_sort(group.begin(), group.end(), [](const auto* a, const auto* b) {
      return a->start_time_s < b->start_time_s;
    });
    double cursor = 0.0;
    for (const auto* rec : group) {
      if (options.idle_fill && rec->start_time_s > cursor) {
        samples.push_back({cursor, rec->start_time_s - cursor, idle_w});
      }
      samples.push_back(
          {rec->start_time_s, rec->duration_s, power_of_mfu(cluster.gpu, rec->mfu_pct / 100.0) * tp});
      cursor = std::max(cursor, rec->end_time_s());
    }
    if (options.idle_fill && horizon > cursor) {
      samples.push_back({cursor, horizon - cursor, idle_w});
    }
  }
  return samples;
}

}  // namespace ecoinfer
