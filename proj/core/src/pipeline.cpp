#include "ecoinfer/pipeline.hpp"

namespace ecoinfer {

PowerStageResult power_stage(std::span<const BatchStageRecord> records,
                             const ScenarioConfig& config) {
  const auto& cluster = config.cluster;
  PowerStageResult out;
  PowerOptions options;
  options.idle_fill = config.idle_fill;
  out.samples = stages_to_power(records, cluster, options);
  out.energy = energy(out.samples, cluster, config.pue);
  out.carbon = carbon_static(out.energy, config.static_ci, cluster.gpu);

  BinOptions bins;
  bins.resolution = config.resolution;
  bins.epoch = config.epoch;
  bins.fill = config.empty_bin_fill;
  bins.idle_floor_w = cluster.gpu.p_idle_w * cluster.gpu_count();
  out.load = bin_power(out.samples, bins);
  return out;
}

GridScenario make_grid_scenario(const PowerSeries& load, const IntegrationConfig& g) {
  GridScenario s;
  s.load = load;
  s.solar = read_env_trace(g.solar_trace, EnvKind::SolarIrradiance);
  s.ci = read_env_trace(g.ci_trace, EnvKind::CarbonIntensity);
  s.solar_capacity_w = g.solar_capacity_w;
  s.battery = g.battery;
  s.step = g.step;
  s.ci_low = g.ci_low;
  s.ci_high = g.ci_high;
  s.policy = g.policy;
  s.solar_method = g.solar_method;
  s.ci_method = g.ci_method;
  s.extrapolate = g.extrapolate;
  s.lookahead_guard = g.lookahead_guard;
  return s;
}

PipelineResult run_pipeline(const ScenarioConfig& config) {
  PipelineResult out;
  out.requests = generate(config.workload);
  out.sim = run(out.requests, config.cluster);
  out.power = power_stage(out.sim.records, config);
  if (config.integration) {
    const auto load = quantize_to_profile_precision(out.power.load);
    out.cosim = cosimulate(make_grid_scenario(load, *config.integration));
  }
  return out;
}

}  // namespace ecoinfer
