#pragma once

#include <iosfwd>
#include <span>

#include "ecoinfer/engine.hpp"
#include "ecoinfer/power.hpp"
#include "ecoinfer/signal.hpp"

namespace ecoinfer {

inline constexpr double kJoulesPerKwh = 3.6e6;

struct EnergyReport {
  double e_op_kwh = 0.0;        // PUE-adjusted operational energy
  double it_energy_kwh = 0.0;   // GPU energy before PUE
  double gpu_hours = 0.0;       // makespan / 3600 * G
  double mean_power_w = 0.0;    // sum(w dt) / sum(dt) over samples
  double mean_gpu_power_w = 0.0;  // GPU energy / (makespan * G)
  double makespan_s = 0.0;
  double pue = 1.0;
};

struct CarbonReport {
  double c_total_g = 0.0;
  double c_operational_g = 0.0;
  double c_embodied_g = 0.0;
  double ci_used = 0.0;  // static intensity, or the energy-weighted mean of a trace
};

// E_op = sum(P_i * dt_i) * PUE. Throws DataError on empty input and
// ConfigError when pue < 1.
EnergyReport energy(std::span<const PowerSample> samples, const ClusterConfig& cluster, double pue);

// C = E_op * CI + H * phi_manuf
CarbonReport carbon_static(const EnergyReport& energy, double ci_g_per_kwh, const GpuProfile& gpu);

// Time-varying intensity: each load-profile bin's energy (times PUE) is
// charged at the intensity sampled at the bin start. `ci` must be on the
// series grid (see resample_env).
CarbonReport carbon_trace(const PowerSeries& load, const EnvTrace& ci, double pue,
                          const EnergyReport& energy, const GpuProfile& gpu);

void write_energy_report(std::ostream& out, const EnergyReport& energy);
void write_carbon_report(std::ostream& out, const CarbonReport& carbon);

}  // namespace ecoinfer
