#include "ecoinfer/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"

namespace ecoinfer {

EnergyReport energy(std::span<const PowerSample> samples, const ClusterConfig& cluster, double pue) {
  if (samples.empty()) throw DataError("energy: no power samples");
  if (!(pue >= 1.0) || !std::isfinite(pue)) throw ConfigError("energy: pue must be >= 1");

  double joules = 0.0;
  double sample_time = 0.0;
  double first = samples.front().start_time_s;
  double last = samples.front().end_time_s();
  for (const auto& s : samples) {
    joules += s.watts * s.duration_s;
    sample_time += s.duration_s;
    first = std::min(first, s.start_time_s);
    last = std::max(last, s.end_time_s());
  }

  EnergyReport r;
  r.pue = pue;
  r.makespan_s = last - first;
  r.it_energy_kwh = joules / kJoulesPerKwh;
  r.e_op_kwh = joules * pue / kJoulesPerKwh;
  r.gpu_hours = r.makespan_s / 3600.0 * cluster.gpu_count();
  r.mean_power_w = sample_time > 0.0 ? joules / sample_time : 0.0;
  r.mean_gpu_power_w = r.makespan_s > 0.0 ? joules / (r.makespan_s * cluster.gpu_count()) : 0.0;
  return r;
}

CarbonReport carbon_static(const EnergyReport& energy, double ci_g_per_kwh, const GpuProfile& gpu) {
  if (!(ci_g_per_kwh >= 0.0)) throw ConfigError("carbon: intensity must be non-negative");
  CarbonReport c;
  c.ci_used = ci_g_per_kwh;
  c.c_operational_g = energy.e_op_kwh * ci_g_per_kwh;
  c.c_embodied_g = energy.gpu_hours * gpu.phi_manuf_g_per_gpu_hour;
  c.c_total_g = c.c_operational_g + c.c_embodied_g;
  return c;
}

CarbonReport carbon_trace(const PowerSeries& load, const EnvTrace& ci, double pue,
                          const EnergyReport& energy, const GpuProfile& gpu) {
  if (ci.values.size() != load.values.size() || (!ci.timestamps.empty() &&
                                                 ci.timestamps.front() != load.start)) {
    throw DataError("carbon: intensity trace is not on the load profile grid");
  }
  const double hours_per_bin = static_cast<double>(load.resolution.count()) / 3600.0;
  double kwh = 0.0;
  CarbonReport c;
  for (std::size_t b = 0; b < load.values.size(); ++b) {
    const double bin_kwh = load.values[b] * hours_per_bin / 1000.0 * pue;
    kwh += bin_kwh;
    c.c_operational_g += bin_kwh * ci.values[b];
  }
  c.ci_used = kwh > 0.0 ? c.c_operational_g / kwh : 0.0;
  c.c_embodied_g = energy.gpu_hours * gpu.phi_manuf_g_per_gpu_hour;
  c.c_total_g = c.c_operational_g + c.c_embodied_g;
  return c;
}

void write_energy_report(std::ostream& out, const EnergyReport& e) {
  out << "e_op_kwh=" << detail::exact(e.e_op_kwh) << '\n'
      << "it_energy_kwh=" << detail::exact(e.it_energy_kwh) << '\n'
      << "gpu_hours=" << detail::exact(e.gpu_hours) << '\n'
      << "mean_power_w=" << detail::exact(e.mean_power_w) << '\n'
      << "mean_gpu_power_w=" << detail::exact(e.mean_gpu_power_w) << '\n'
      << "makespan_s=" << detail::exact(e.makespan_s) << '\n'
      << "pue=" << detail::exact(e.pue) << '\n';
}

void write_carbon_report(std::ostream& out, const CarbonReport& c) {
  out << "c_total_g=" << detail::exact(c.c_total_g) << '\n'
      << "c_operational_g=" << detail::exact(c.c_operational_g) << '\n'
      << "c_embodied_g=" << detail::exact(c.c_embodied_g) << '\n'
      << "ci_used=" << detail::exact(c.ci_used) << '\n';
}

}  // namespace ecoinfer
