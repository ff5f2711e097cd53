#pragma once

// Scripted parameter sweeps over the default scenario. Each grid point runs
// workload -> simulate -> power -> energy in isolation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecoinfer/scenario.hpp"

namespace ecoinfer {

enum class Experiment { Requests, PdRatio, BatchSize, Qps, Parallelism };

Experiment parse_experiment(std::string_view name);  // ConfigError when unknown
std::string_view to_string(Experiment experiment);

struct SweepPoint {
  std::string experiment;
  std::string model;
  int tp = 1;
  int pp = 1;
  int batch_cap = 0;
  std::int64_t requests = 0;
  double qps = 0.0;
  double pd_ratio = 0.0;
  int length = 0;  // fixed request length; 0 for the Zipf mix
  double mean_gpu_power_w = 0.0;
  double energy_kwh = 0.0;  // PUE included
  double mean_mfu_pct = 0.0;
  double mean_batch_size = 0.0;
  double makespan_s = 0.0;
  double gpu_hours = 0.0;
};

// Model list of the request-count sweep; the 70B class runs on TP=2, PP=2.
struct ModelPlacement {
  std::string model;
  int tp = 1;
  int pp = 1;
};
std::vector<ModelPlacement> requests_models();
std::vector<std::int64_t> requests_grid();  // 2^8 .. 2^16
std::vector<double> pd_ratio_grid();        // 50 .. 0.02, log spaced
std::vector<int> length_grid();             // 128 .. 4096
std::vector<int> batch_cap_grid();          // 1 .. 128
std::vector<double> qps_grid();             // 0.1 .. 50, log spaced
std::vector<int> parallel_degrees();        // 1, 2, 4

struct SweepOptions {
  // Replaces the request count of every grid point (the requests sweep keeps
  // its own grid). Used for quick runs.
  std::optional<std::int64_t> requests;
  // Request count for the QPS sweep when `requests` is unset.
  std::int64_t qps_requests = 1 << 14;
  int jobs = 1;
};

// Runs one fully specified scenario and summarises it as a sweep row.
SweepPoint evaluate(const ScenarioConfig& config);

std::vector<SweepPoint> run_experiment(Experiment experiment, const ScenarioConfig& base,
                                       const SweepOptions& options = {});

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);
std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path);

// Power and energy panels per sweep, plus MFU for the QPS sweep.
void plot_experiment(Experiment experiment, const std::vector<SweepPoint>& points,
                     const std::filesystem::path& svg_path);

}  // namespace ecoinfer
