#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ecoinfer/engine.hpp"

namespace ecoinfer {

// Constant power drawn over [start, start + duration). Watts cover every GPU
// attributed to the sample (TP GPUs of one pipeline stage).
struct PowerSample {
  double start_time_s = 0.0;
  double duration_s = 0.0;
  double watts = 0.0;

  double end_time_s() const { return start_time_s + duration_s; }
};

// P(mfu) = P_idle + (P_max - P_idle) * (min(mfu, mfu_sat) / mfu_sat)^gamma
// `mfu` is a fraction; values outside [0, 1] are clamped.
double power_of_mfu(const GpuProfile& gpu, double mfu);

struct PowerOptions {
  // Emit p_idle samples for every (replica, stage) GPU group whenever it has
  // no record, from time 0 to the horizon.
  bool idle_fill = true;
  // End of the timeline; defaults to the latest record end.
  std::optional<double> horizon_s;
};

// One sample per record (power_of_mfu * TP), plus idle samples so that every
// GPU group of the R x PP topology has a hole-free timeline. Output is grouped
// by (replica, stage) and time-ordered within each group.
std::vector<PowerSample> stages_to_power(std::span<const BatchStageRecord> records,
                                         const ClusterConfig& cluster,
                                         const PowerOptions& options = {});

}  // namespace ecoinfer
