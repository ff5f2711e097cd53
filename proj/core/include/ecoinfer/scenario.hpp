#pragma once

// Declarative run configuration. The JSON file mirrors the two parameter
// panels of a study: "inference" (workload, cluster, accounting) and
// "integration" (microgrid co-simulation). Every key is optional and
// overrides the builtin default.
//
//   {
//     "inference":   { "device": "a100-sxm4-80g", "model": "llama-3-8b",
//                      "tp": 1, "pp": 1, "replicas": 1, "batch_cap": 128,
//                      "max_tokens": 4096, "qps": 6.45, "requests": 1024,
//                      "zipf_theta": 0.6, "len_min": 1024, "len_max": 4096,
//                      "pd_ratio": 20.0, "pue": 1.2, "ci": 418.2,
//                      "roofline_efficiency": 0.46, "stage_overhead_s": 0.0015,
//                      "resolution_s": 60, "idle_fill": true },
//     "integration": { "solar_trace": "data/solar_week.csv",
//                      "ci_trace": "data/ci_week.csv",
//                      "solar_capacity_w": 600, "step_s": 60,
//                      "ci_low": 100, "ci_high": 200, "policy": "passive",
//                      "battery": { "capacity_wh": 100, "soc_init": 0.8, ... } },
//     "profiles":    { "gpus": [ {...} ], "models": [ {...} ] },
//     "seed": 42, "output_dir": "out", "start": "2025-06-02T06:00:00Z"
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ecoinfer/engine.hpp"
#include "ecoinfer/grid.hpp"
#include "ecoinfer/profiles.hpp"
#include "ecoinfer/signal.hpp"
#include "ecoinfer/workload.hpp"

namespace ecoinfer {

struct IntegrationConfig {
  std::filesystem::path solar_trace;
  std::filesystem::path ci_trace;
  double solar_capacity_w = 600.0;
  BatteryConfig battery;
  std::chrono::seconds step{60};
  double ci_low = 100.0;
  double ci_high = 200.0;
  GridPolicy policy = GridPolicy::Passive;
  Interpolation solar_method = Interpolation::Cubic;
  Interpolation ci_method = Interpolation::Cubic;
  bool extrapolate = false;
  bool lookahead_guard = true;
};

struct ScenarioConfig {
  ProfileCatalog catalog;
  std::string gpu_name = "a100-sxm4-80g";
  std::string model_name = "llama-3-8b";
  WorkloadConfig workload;
  ClusterConfig cluster;              // gpu/model resolved from the catalog
  double pue = 1.2;
  double static_ci = 418.2;           // gCO2/kWh for the static carbon report
  UtcSeconds epoch{};                 // absolute time of simulation second 0
  std::chrono::seconds resolution{60};
  bool idle_fill = true;
  EmptyBinFill empty_bin_fill = EmptyBinFill::IdleFloor;
  std::optional<IntegrationConfig> integration;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;

  // Re-resolves profiles, pushes shared fields (seed, max_tokens) into the
  // sub-configs and validates everything. Throws ConfigError.
  void finalize();
};

// Defaults of the controlled experiments: A100, Llama-3-8B, TP=PP=1,
// batch cap 128, 4096 max tokens, 1024 Poisson requests at 6.45 QPS, PUE 1.2.
ScenarioConfig default_scenario();

// Defaults of the co-simulation study: Llama-2-7B, 400k requests at 20 QPS,
// Zipf 1K-4K with theta 0.6, P:D 20, 600 W solar, 100 Wh battery.
ScenarioConfig integration_scenario();

// Applies every key present in `doc` on top of `config`; relative trace paths
// resolve against `base_dir`. Unknown keys raise ConfigError.
void apply_json(ScenarioConfig& config, const nlohmann::json& doc,
                const std::filesystem::path& base_dir = {});

ScenarioConfig load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioConfig& config);

GridPolicy parse_policy(std::string_view name);
Interpolation parse_interpolation(std::string_view name);
std::string_view to_string(GridPolicy policy);
std::string_view to_string(Interpolation method);

}  // namespace ecoinfer
