#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "ecoinfer/engine.hpp"
#include "ecoinfer/grid.hpp"
#include "ecoinfer/scenario.hpp"
#include "ecoinfer/workload.hpp"

namespace fixtures {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

ecoinfer::UtcSeconds day_start();  // 2025-06-02T00:00:00Z

// 24 h at one-minute steps: 600 W of solar for the first 8 h then none,
// constant 245 W load, constant 418.2 gCO2/kWh, passive battery defaults.
ecoinfer::GridScenario square_wave_day();

// Steps whose report totals are 5.90 kWh demand, 4.15 kWh direct solar,
// 2.47 kg total emissions and 1.71 kg solar offset.
std::vector<ecoinfer::StepState> report_totals_states();

// A small transformer so randomized engine runs stay cheap.
ecoinfer::ModelProfile tiny_model(Rng& rng);

// Random cluster over the builtin A100 and a small model.
ecoinfer::ClusterConfig random_cluster(Rng& rng);

// Random short trace that fits cluster.max_tokens.
std::vector<ecoinfer::Request> random_trace(Rng& rng, int max_tokens, int max_requests = 40);

// Random hole-free microgrid scenario of `steps` minutes.
ecoinfer::GridScenario random_grid(Rng& rng, std::size_t steps);

// Default scenario shrunk to a few requests, no file traces.
ecoinfer::ScenarioConfig small_scenario(std::uint64_t seed, std::int64_t requests);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace fixtures
