#include "ecoinfer/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"

namespace ecoinfer {

namespace {

constexpr const char* kStepHeader = "timestamp,load_w,solar_w,battery_w,grid_w,soc,ci,step_emissions_g";

double import_emissions_g(double grid_w, double ci, double dt_s) {
  return std::max(grid_w, 0.0) * dt_s / 3600.0 / 1000.0 * ci;
}

struct Horizon {
  const std::vector<double>& load;
  const std::vector<double>& solar;
  const std::vector<double>& ci;
  const GridScenario& scenario;
};

// Emissions from step `from` to the end when every step follows `base`:
// plain passive dispatch, or the unguarded threshold rule.
double rollout_g(const Horizon& h, std::size_t from, double soc, GridPolicy base) {
  const double dt_s = static_cast<double>(h.scenario.step.count());
  double total = 0.0;
  for (std::size_t k = from; k < h.load.size(); ++k) {
    auto directive = BatteryDirective::Passive;
    if (base == GridPolicy::CarbonThreshold) {
      StepState st;
      st.load_w = h.load[k];
      st.solar_w = h.solar[k];
      st.soc = soc;
      st.ci = h.ci[k];
      directive = carbon_threshold_policy(st, h.scenario);
    }
    const auto out = dispatch(directive, soc, h.load[k], h.solar[k], h.scenario.battery,
                              h.scenario.step);
    total += import_emissions_g(out.grid_w, h.ci[k], dt_s);
    soc = out.soc;
  }
  return total;
}

// Best of the two base policies. Choosing each step's action against this
// value keeps the realised emissions at or below both of them.
double rollout_value_g(const Horizon& h, std::size_t from, double soc) {
  return std::min(rollout_g(h, from, soc, GridPolicy::Passive),
                  rollout_g(h, from, soc, GridPolicy::CarbonThreshold));
}

}  // namespace

void BatteryConfig::validate() const {
  if (!(capacity_wh > 0.0)) throw ConfigError("battery: capacity must be positive");
  if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) {
    throw ConfigError("battery: require 0 <= soc_min < soc_max <= 1");
  }
  if (!(soc_init >= soc_min && soc_init <= soc_max)) {
    throw ConfigError("battery: soc_init must lie within [soc_min, soc_max]");
  }
  if (!(max_charge_w >= 0.0) || !(max_discharge_w >= 0.0)) {
    throw ConfigError("battery: power limits must be non-negative");
  }
  if (!(round_trip_efficiency > 0.0 && round_trip_efficiency <= 1.0)) {
    throw ConfigError("battery: efficiency must lie in (0, 1]");
  }
}

void GridScenario::validate() const {
  battery.validate();
  if (step.count() <= 0) throw ConfigError("grid: step must be positive");
  if (load.values.empty()) throw DataError("grid: load profile is empty");
  if (load.resolution != step) {
    throw ConfigError("grid: step (" + std::to_string(step.count()) +
                      " s) must match the load profile resolution (" +
                      std::to_string(load.resolution.count()) + " s)");
  }
  if (!(ci_low < ci_high)) throw ConfigError("grid: ci_low must be below ci_high");
  if (!(solar_capacity_w >= 0.0)) throw ConfigError("grid: solar capacity must be non-negative");
  solar.validate();
  ci.validate();
}

BatteryDirective carbon_threshold_policy(const StepState& state, const GridScenario& scenario) {
  const auto& b = scenario.battery;
  if (state.ci <= scenario.ci_low && state.soc < b.soc_max && b.max_charge_w > 0.0) {
    return BatteryDirective::ChargeFromGrid;
  }
  if (state.ci >= scenario.ci_high && state.load_w > state.solar_w && state.soc > b.soc_min) {
    return BatteryDirective::Discharge;
  }
  return BatteryDirective::Passive;
}

StepOutcome dispatch(BatteryDirective directive, double soc, double load_w, double solar_w,
                     const BatteryConfig& battery, std::chrono::seconds dt) {
  const double dt_h = static_cast<double>(dt.count()) / 3600.0;
  const double eff = battery.round_trip_efficiency;
  // Bus-side power limits implied by the remaining SoC range.
  const double room_w = std::max(0.0, (battery.soc_max - soc) * battery.capacity_wh / dt_h / eff);
  const double stock_w = std::max(0.0, (soc - battery.soc_min) * battery.capacity_wh / dt_h);
  const double charge_limit = std::min(battery.max_charge_w, room_w);
  const double discharge_limit = std::min(battery.max_discharge_w, stock_w);

  const double net = solar_w - load_w;
  double charge = 0.0;
  double discharge = 0.0;
  if (directive == BatteryDirective::ChargeFromGrid) {
    charge = charge_limit;
  } else if (net >= 0.0) {
    charge = std::min(net, charge_limit);
  } else {
    discharge = std::min(-net, discharge_limit);
  }

  StepOutcome out;
  out.battery_w = discharge - charge;
  out.grid_w = load_w - solar_w - out.battery_w;
  const double soc_next = soc + (charge * eff - discharge) * dt_h / battery.capacity_wh;
  out.soc = std::clamp(soc_next, battery.soc_min, battery.soc_max);
  return out;
}

CosimResult cosimulate(const GridScenario& scenario) {
  scenario.validate();
  const auto& load = scenario.load;
  const std::size_t n = load.values.size();
  const auto solar_r = resample_env(scenario.solar, scenario.step, load.start, load.end(),
                                    {scenario.solar_method, scenario.extrapolate});
  const auto ci_r = resample_env(scenario.ci, scenario.step, load.start, load.end(),
                                 {scenario.ci_method, scenario.extrapolate});

  std::vector<double> solar_w(n);
  for (std::size_t k = 0; k < n; ++k) solar_w[k] = solar_r.values[k] * scenario.solar_capacity_w;
  const auto& ci = ci_r.values;
  const double dt_s = static_cast<double>(scenario.step.count());

  CosimResult result;
  result.steps.reserve(n);
  double soc = scenario.battery.soc_init;
  for (std::size_t k = 0; k < n; ++k) {
    StepState state;
    state.time = load.time_at(k);
    state.load_w = load.values[k];
    state.solar_w = solar_w[k];
    state.soc = soc;
    state.ci = ci[k];

    auto directive = BatteryDirective::Passive;
    if (scenario.policy == GridPolicy::CarbonThreshold) {
      directive = carbon_threshold_policy(state, scenario);
    }
    auto outcome = dispatch(directive, soc, state.load_w, state.solar_w, scenario.battery,
                            scenario.step);
    if (directive != BatteryDirective::Passive && scenario.lookahead_guard) {
      const auto passive = dispatch(BatteryDirective::Passive, soc, state.load_w, state.solar_w,
                                    scenario.battery, scenario.step);
      if (passive.soc != outcome.soc || passive.grid_w != outcome.grid_w) {
        const Horizon h{load.values, solar_w, ci, scenario};
        const double with_rule = import_emissions_g(outcome.grid_w, ci[k], dt_s) +
                                 rollout_value_g(h, k + 1, outcome.soc);
        const double without = import_emissions_g(passive.grid_w, ci[k], dt_s) +
                               rollout_value_g(h, k + 1, passive.soc);
        if (!(with_rule < without)) outcome = passive;
      }
    }

    state.battery_w = outcome.battery_w;
    state.grid_w = outcome.grid_w;
    state.soc = outcome.soc;
    state.step_emissions_g = import_emissions_g(outcome.grid_w, state.ci, dt_s);
    soc = outcome.soc;
    result.steps.push_back(state);
  }
  result.report = report_metrics(result.steps, {scenario.step, scenario.ci_high,
                                                scenario.battery.capacity_wh});
  return result;
}

CosimReport report_metrics(std::span<const StepState> states, const ReportParams& params) {
  if (states.empty()) throw DataError("report: no step states");
  const double dt_h = static_cast<double>(params.step.count()) / 3600.0;
  const double n = static_cast<double>(states.size());

  CosimReport r;
  double charging = 0.0, discharging = 0.0, soc_sum = 0.0, ci_sum = 0.0;
  double below_50 = 0.0, above_80 = 0.0, high_ci = 0.0;
  for (const auto& s : states) {
    const double to_kwh = dt_h / 1000.0;
    const double direct_solar = std::min(s.solar_w, s.load_w);
    r.total_demand_kwh += s.load_w * to_kwh;
    r.solar_gen_kwh += s.solar_w * to_kwh;
    r.solar_consumed_kwh += direct_solar * to_kwh;
    r.grid_import_kwh += std::max(s.grid_w, 0.0) * to_kwh;
    r.grid_export_kwh += std::max(-s.grid_w, 0.0) * to_kwh;
    r.battery_charge_kwh += std::max(-s.battery_w, 0.0) * to_kwh;
    r.battery_discharge_kwh += std::max(s.battery_w, 0.0) * to_kwh;
    r.net_footprint_g += s.step_emissions_g;
    r.offset_by_solar_g += direct_solar * to_kwh * s.ci;
    ci_sum += s.ci;
    soc_sum += s.soc;
    if (s.ci > params.ci_high) high_ci += 1.0;
    if (s.soc < 0.5) below_50 += 1.0;
    if (s.soc > 0.8) above_80 += 1.0;
    if (s.battery_w < 0.0) charging += 1.0;
    if (s.battery_w > 0.0) discharging += 1.0;
  }
  r.total_emissions_g = r.net_footprint_g + r.offset_by_solar_g;
  if (r.total_demand_kwh > 0.0) {
    r.renewable_share_pct = r.solar_consumed_kwh / r.total_demand_kwh * 100.0;
    r.grid_dependency_pct = r.grid_import_kwh / r.total_demand_kwh * 100.0;
  }
  if (r.total_emissions_g > 0.0) {
    r.carbon_offset_pct = r.offset_by_solar_g / r.total_emissions_g * 100.0;
  }
  r.avg_ci = ci_sum / n;
  r.hours_high_ci = high_ci * dt_h;
  r.avg_soc_pct = soc_sum / n * 100.0;
  r.hours_below_50_soc = below_50 * dt_h;
  r.hours_above_80_soc = above_80 * dt_h;
  r.charging_frac_pct = charging / n * 100.0;
  r.discharging_frac_pct = discharging / n * 100.0;
  r.idle_frac_pct = (n - charging - discharging) / n * 100.0;
  r.full_cycles = (r.battery_charge_kwh + r.battery_discharge_kwh) * 1000.0 /
                  (2.0 * params.battery_capacity_wh);
  return r;
}

void write_step_log(const std::filesystem::path& path, std::span<const StepState> steps) {
  auto out = detail::open_for_write(path);
  out << kStepHeader << '\n';
  for (const auto& s : steps) {
    out << format_iso8601(s.time) << ',' << detail::exact(s.load_w) << ','
        << detail::exact(s.solar_w) << ',' << detail::exact(s.battery_w) << ','
        << detail::exact(s.grid_w) << ',' << detail::exact(s.soc) << ',' << detail::exact(s.ci)
        << ',' << detail::exact(s.step_emissions_g) << '\n';
  }
}

std::vector<StepState> read_step_log(const std::filesystem::path& path) {
  detail::CsvReader reader(path);
  reader.expect_header(kStepHeader);
  std::vector<StepState> steps;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 8) reader.fail("expected 8 columns, found " + std::to_string(f.size()));
    StepState s;
    try {
      s.time = parse_iso8601(f[0]);
    } catch (const DataError& e) {
      reader.fail(e.what());
    }
    s.load_w = reader.to_double(f[1], "load_w");
    s.solar_w = reader.to_double(f[2], "solar_w");
    s.battery_w = reader.to_double(f[3], "battery_w");
    s.grid_w = reader.to_double(f[4], "grid_w");
    s.soc = reader.to_double(f[5], "soc");
    s.ci = reader.to_double(f[6], "ci");
    s.step_emissions_g = reader.to_double(f[7], "step_emissions_g");
    steps.push_back(s);
  }
  if (steps.empty()) throw DataError(path.string() + ": step log is empty");
  return steps;
}

void write_cosim_report(std::ostream& out, const CosimReport& r) {
  using detail::exact;
  out << "total_energy_demand_kwh=" << exact(r.total_demand_kwh) << '\n'
      << "solar_generation_kwh=" << exact(r.solar_gen_kwh) << '\n'
      << "solar_consumed_kwh=" << exact(r.solar_consumed_kwh) << '\n'
      << "grid_consumption_kwh=" << exact(r.grid_import_kwh) << '\n'
      << "grid_export_kwh=" << exact(r.grid_export_kwh) << '\n'
      << "renewable_share_pct=" << exact(r.renewable_share_pct) << '\n'
      << "grid_dependency_pct=" << exact(r.grid_dependency_pct) << '\n'
      << "total_emissions_g=" << exact(r.total_emissions_g) << '\n'
      << "offset_by_solar_g=" << exact(r.offset_by_solar_g) << '\n'
      << "net_footprint_g=" << exact(r.net_footprint_g) << '\n'
      << "time_in_high_ci_hours=" << exact(r.hours_high_ci) << '\n'
      << "avg_soc_pct=" << exact(r.avg_soc_pct) << '\n'
      << "time_below_50_soc_hours=" << exact(r.hours_below_50_soc) << '\n'
      << "time_above_80_soc_hours=" << exact(r.hours_above_80_soc) << '\n'
      << "charging_duration_pct=" << exact(r.charging_frac_pct) << '\n'
      << "discharging_duration_pct=" << exact(r.discharging_frac_pct) << '\n'
      << "idle_time_pct=" << exact(r.idle_frac_pct) << '\n'
      << "carbon_offset_pct=" << exact(r.carbon_offset_pct) << '\n'
      << "avg_carbon_intensity=" << exact(r.avg_ci) << '\n'
      << "battery_full_cycles=" << exact(r.full_cycles) << '\n';
}

}  // namespace ecoinfer
