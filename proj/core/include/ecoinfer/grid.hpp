#pragma once

// Time-stepped microgrid: inference load, scaled solar generation, one
// battery and the public grid with a time-varying carbon intensity.
//
// Sign conventions: battery_w > 0 discharges into the bus, grid_w > 0
// imports. Every step satisfies load_w = solar_w + battery_w + grid_w.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ecoinfer/signal.hpp"

namespace ecoinfer {

struct BatteryConfig {
  double capacity_wh = 100.0;
  double soc_init = 0.8;
  double soc_min = 0.2;
  double soc_max = 1.0;
  double max_charge_w = 100.0;
  double max_discharge_w = 100.0;
  double round_trip_efficiency = 0.9;  // applied on charge only

  void validate() const;
};

enum class GridPolicy { Passive, CarbonThreshold };

struct GridScenario {
  PowerSeries load;
  EnvTrace solar;                 // irradiance as a fraction of solar_capacity_w
  double solar_capacity_w = 600.0;
  EnvTrace ci;                    // gCO2/kWh
  BatteryConfig battery;
  std::chrono::seconds step{60};  // must equal load.resolution
  double ci_low = 100.0;
  double ci_high = 200.0;
  GridPolicy policy = GridPolicy::Passive;
  Interpolation solar_method = Interpolation::Cubic;
  Interpolation ci_method = Interpolation::Cubic;
  bool extrapolate = false;
  // Adopt a threshold directive only when it lowers emissions over the rest of
  // the horizon, valued as the better of a passive and a rule-following
  // roll-out. Guarantees net_footprint <= the passive policy's.
  bool lookahead_guard = true;

  void validate() const;
};

struct StepState {
  UtcSeconds time{};
  double load_w = 0.0;
  double solar_w = 0.0;
  double battery_w = 0.0;
  double grid_w = 0.0;
  double soc = 0.0;         // after the step
  double ci = 0.0;
  double step_emissions_g = 0.0;

  friend bool operator==(const StepState&, const StepState&) = default;
};

struct CosimReport {
  double total_demand_kwh = 0.0;
  double solar_gen_kwh = 0.0;
  double solar_consumed_kwh = 0.0;   // solar used directly by the load
  double grid_import_kwh = 0.0;
  double grid_export_kwh = 0.0;
  double battery_charge_kwh = 0.0;   // bus side
  double battery_discharge_kwh = 0.0;
  double renewable_share_pct = 0.0;
  double grid_dependency_pct = 0.0;
  double total_emissions_g = 0.0;    // net_footprint + offset_by_solar
  double offset_by_solar_g = 0.0;
  double net_footprint_g = 0.0;      // emissions of actual grid imports
  double carbon_offset_pct = 0.0;
  double avg_ci = 0.0;
  double hours_high_ci = 0.0;
  double avg_soc_pct = 0.0;
  double hours_below_50_soc = 0.0;
  double hours_above_80_soc = 0.0;
  double charging_frac_pct = 0.0;
  double discharging_frac_pct = 0.0;
  double idle_frac_pct = 0.0;
  double full_cycles = 0.0;
};

struct CosimResult {
  std::vector<StepState> steps;
  CosimReport report;
};

enum class BatteryDirective { Passive, ChargeFromGrid, Discharge };

// Threshold rules evaluated on the pre-step state (load, solar, previous soc,
// ci). ci <= ci_low with headroom: charge from the grid. ci >= ci_high with
// unmet load and charge left: discharge. Otherwise passive.
BatteryDirective carbon_threshold_policy(const StepState& state, const GridScenario& scenario);

struct StepOutcome {
  double battery_w = 0.0;
  double grid_w = 0.0;
  double soc = 0.0;
};

// Battery and grid dispatch for one step of `dt` seconds.
StepOutcome dispatch(BatteryDirective directive, double soc, double load_w, double solar_w,
                     const BatteryConfig& battery, std::chrono::seconds dt);

CosimResult cosimulate(const GridScenario& scenario);

struct ReportParams {
  std::chrono::seconds step{60};
  double ci_high = 200.0;
  double battery_capacity_wh = 100.0;
};

CosimReport report_metrics(std::span<const StepState> states, const ReportParams& params);

// CSV header: timestamp,load_w,solar_w,battery_w,grid_w,soc,ci,step_emissions_g
void write_step_log(const std::filesystem::path& path, std::span<const StepState> steps);
std::vector<StepState> read_step_log(const std::filesystem::path& path);

void write_cosim_report(std::ostream& out, const CosimReport& report);

}  // namespace ecoinfer
