#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ecoinfer/accounting.hpp"
#include "ecoinfer/grid.hpp"
#include "ecoinfer/scenario.hpp"

namespace ecoinfer {

struct PowerStageResult {
  std::vector<PowerSample> samples;
  EnergyReport energy;
  CarbonReport carbon;   // static intensity
  PowerSeries load;      // full precision; the CSV keeps 6 significant digits
};

// Stage records -> power samples -> energy, carbon and the binned profile.
PowerStageResult power_stage(std::span<const BatchStageRecord> records,
                             const ScenarioConfig& config);

// Loads the configured traces and builds the co-simulation input.
GridScenario make_grid_scenario(const PowerSeries& load, const IntegrationConfig& integration);

struct PipelineResult {
  std::vector<Request> requests;
  SimResult sim;
  PowerStageResult power;
  std::optional<CosimResult> cosim;
};

// simulate -> power -> (cosim when integration is configured), in process.
// The load handed to the co-simulation is rounded exactly as the load profile
// file would round it, so chaining the CLI subcommands through files yields
// the same report values.
PipelineResult run_pipeline(const ScenarioConfig& config);

}  // namespace ecoinfer
