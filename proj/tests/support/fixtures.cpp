#include "fixtures.hpp"

#include <atomic>
#include <cmath>

#include <unistd.h>

namespace fixtures {

using namespace ecoinfer;
using std::chrono::minutes;
using std::chrono::seconds;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

UtcSeconds day_start() { return parse_iso8601("2025-06-02T00:00:00Z"); }

GridScenario square_wave_day() {
  GridScenario s;
  s.load.start = day_start();
  s.load.resolution = seconds{60};
  s.load.values.assign(1440, 245.0);
  s.solar.kind = EnvKind::SolarIrradiance;
  s.ci.kind = EnvKind::CarbonIntensity;
  for (int m = 0; m < 1440; ++m) {
    s.solar.timestamps.push_back(day_start() + minutes{m});
    s.solar.values.push_back(m < 8 * 60 ? 1.0 : 0.0);
    s.ci.timestamps.push_back(day_start() + minutes{m});
    s.ci.values.push_back(418.2);
  }
  s.solar_capacity_w = 600.0;
  s.step = seconds{60};
  s.policy = GridPolicy::Passive;
  return s;
}

std::vector<StepState> report_totals_states() {
  // 250 W for one minute is 1/240 kWh. 996 solar-fed minutes give 4.15 kWh
  // and 420 grid-fed minutes give the remaining 1.75 kWh.
  constexpr double load = 250.0;
  constexpr double kwh_per_step = load / 60.0 / 1000.0;
  constexpr int solar_steps = 996;
  constexpr int grid_steps = 420;
  const double ci_solar = 1710.0 / (solar_steps * kwh_per_step);
  const double ci_grid = 760.0 / (grid_steps * kwh_per_step);

  std::vector<StepState> states;
  auto t = day_start();
  for (int i = 0; i < solar_steps + grid_steps; ++i, t += minutes{1}) {
    StepState s;
    s.time = t;
    s.load_w = load;
    s.soc = 0.5;
    if (i < solar_steps) {
      s.solar_w = load;
      s.ci = ci_solar;
    } else {
      s.grid_w = load;
      s.ci = ci_grid;
      s.step_emissions_g = kwh_per_step * ci_grid;
    }
    states.push_back(s);
  }
  return states;
}

ModelProfile tiny_model(Rng& rng) {
  ModelProfile m;
  m.name = "tiny";
  m.n_heads = 1 << uniform_int(rng, 1, 4);
  m.n_kv_heads = m.n_heads >> uniform_int(rng, 0, 1);
  m.d_model = m.n_heads * 16 * uniform_int(rng, 1, 4);
  m.d_ff = m.d_model * uniform_int(rng, 2, 4);
  m.num_layers = uniform_int(rng, 1, 8);
  m.vocab_size = 1000;
  m.gated_mlp = uniform_int(rng, 0, 1) == 1;
  m.param_count = static_cast<std::int64_t>(m.reconstructed_param_count());
  return m;
}

ClusterConfig random_cluster(Rng& rng) {
  ClusterConfig c;
  c.gpu = builtin_gpu("a100-sxm4-80g");
  // scale the device down so the tiny model is not trivially memory bound
  c.gpu.peak_flops = 1e9 * uniform(rng, 1.0, 50.0);
  c.gpu.mem_bandwidth = 1e8 * uniform(rng, 1.0, 50.0);
  c.model = tiny_model(rng);
  c.replicas = uniform_int(rng, 1, 3);
  c.tensor_parallel = 1 << uniform_int(rng, 0, 2);
  c.pipeline_parallel = 1 << uniform_int(rng, 0, 2);
  c.batch_cap = 1 << uniform_int(rng, 0, 6);
  c.max_tokens = uniform_int(rng, 64, 512);
  c.roofline_efficiency = uniform(rng, 0.2, 1.0);
  c.stage_overhead_s = uniform_int(rng, 0, 1) ? 0.0 : uniform(rng, 0.0, 0.01);
  return c;
}

std::vector<Request> random_trace(Rng& rng, int max_tokens, int max_requests) {
  WorkloadConfig w;
  w.num_requests = uniform_int(rng, 1, max_requests);
  w.qps = uniform(rng, 0.1, 50.0);
  w.len_min = uniform_int(rng, 2, std::max(2, max_tokens / 2));
  w.len_max = uniform_int(rng, w.len_min, max_tokens);
  w.zipf_theta = uniform(rng, 0.0, 1.5);
  w.pd_ratio = std::exp(uniform(rng, std::log(0.02), std::log(50.0)));
  w.max_tokens = max_tokens;
  w.seed = rng();
  return generate(w);
}

GridScenario random_grid(Rng& rng, std::size_t steps) {
  GridScenario s;
  s.load.start = day_start();
  s.load.resolution = seconds{60};
  s.solar.kind = EnvKind::SolarIrradiance;
  s.ci.kind = EnvKind::CarbonIntensity;
  const double base = uniform(rng, 50.0, 800.0);
  for (std::size_t k = 0; k < steps; ++k) {
    s.load.values.push_back(base * uniform(rng, 0.2, 1.5));
  }
  // hourly-ish knots, a little past both ends
  const int knots = static_cast<int>(steps / 30) + 3;
  for (int i = 0; i < knots; ++i) {
    const auto t = day_start() + minutes{30 * i};
    s.solar.timestamps.push_back(t);
    s.solar.values.push_back(uniform_int(rng, 0, 2) == 0 ? 0.0 : uniform(rng, 0.0, 1.0));
    s.ci.timestamps.push_back(t);
    s.ci.values.push_back(uniform(rng, 20.0, 600.0));
  }
  s.solar_capacity_w = uniform(rng, 0.0, 1000.0);
  s.battery.capacity_wh = uniform(rng, 10.0, 500.0);
  s.battery.soc_min = uniform(rng, 0.0, 0.4);
  s.battery.soc_max = uniform(rng, 0.6, 1.0);
  s.battery.soc_init = uniform(rng, s.battery.soc_min, s.battery.soc_max);
  s.battery.max_charge_w = uniform(rng, 0.0, 300.0);
  s.battery.max_discharge_w = uniform(rng, 0.0, 300.0);
  s.battery.round_trip_efficiency = uniform(rng, 0.5, 1.0);
  s.ci_low = uniform(rng, 50.0, 250.0);
  s.ci_high = s.ci_low + uniform(rng, 1.0, 250.0);
  const Interpolation methods[] = {Interpolation::Nearest, Interpolation::Linear,
                                   Interpolation::Cubic};
  s.solar_method = methods[uniform_int(rng, 0, 2)];
  s.ci_method = methods[uniform_int(rng, 0, 2)];
  return s;
}

ScenarioConfig small_scenario(std::uint64_t seed, std::int64_t requests) {
  ScenarioConfig c = default_scenario();
  c.seed = seed;
  c.workload.num_requests = requests;
  c.finalize();
  return c;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("ecoinfer_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
