#include "invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecoinfer/accounting.hpp"
#include "ecoinfer/engine.hpp"
#include "ecoinfer/grid.hpp"
#include "ecoinfer/pipeline.hpp"
#include "ecoinfer/power.hpp"
#include "ecoinfer/profiles.hpp"
#include "ecoinfer/signal.hpp"
#include "ecoinfer/workload.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace invariants {

using namespace ecoinfer;
using fixtures::Rng;
using fixtures::uniform;
using fixtures::uniform_int;

namespace {

// A case returns an empty string when it holds, else a description.
using Case = std::function<std::string(Rng&)>;

Suite cases_of(Case body) {
  return [body](int cases, std::uint64_t seed) {
    Outcome out;
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
      const std::uint64_t case_seed = rng();
      Rng case_rng(case_seed);
      std::string why = body(case_rng);
      out.cases = i + 1;
      if (!why.empty()) {
        out.ok = false;
        out.detail = "case " + std::to_string(i) + " (seed " + std::to_string(case_seed) + "): " + why;
        break;
      }
    }
    return out;
  };
}

bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

std::string fmt(const char* what, double got, double want) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": got " << got << ", expected " << want;
  return os.str();
}

GpuProfile random_gpu(Rng& rng) {
  GpuProfile g;
  g.name = "random";
  g.p_idle_w = uniform(rng, 0.0, 200.0);
  g.p_max_w = g.p_idle_w + uniform(rng, 1.0, 800.0);
  g.mfu_sat = uniform(rng, 0.05, 1.0);
  g.gamma = uniform(rng, 0.05, 0.99);
  g.peak_flops = 1e14;
  g.mem_bandwidth = 1e12;
  return g;
}

// ---------------------------------------------------------------- profiles

std::string profiles_power_endpoints(Rng& rng) {
  std::vector<GpuProfile> gpus{random_gpu(rng)};
  for (const auto& n : builtin_gpu_names()) gpus.push_back(builtin_gpu(n));
  for (const auto& g : gpus) {
    if (power_of_mfu(g, 0.0) != g.p_idle_w) return fmt(("P(0) " + g.name).c_str(), power_of_mfu(g, 0.0), g.p_idle_w);
    if (power_of_mfu(g, g.mfu_sat) != g.p_max_w) {
      return fmt(("P(sat) " + g.name).c_str(), power_of_mfu(g, g.mfu_sat), g.p_max_w);
    }
  }
  return {};
}

std::string profiles_param_reconstruction(Rng& rng) {
  for (const auto& n : builtin_model_names()) {
    const auto m = builtin_model(n);
    const double rebuilt = oracle::param_count(m);
    if (!close(rebuilt, static_cast<double>(m.param_count), 0.10)) {
      return fmt(("params " + n).c_str(), rebuilt, static_cast<double>(m.param_count));
    }
  }
  auto m = fixtures::tiny_model(rng);
  if (!close(m.reconstructed_param_count(), oracle::param_count(m), 1e-12)) {
    return fmt("tiny model params", m.reconstructed_param_count(), oracle::param_count(m));
  }
  return {};
}

// ---------------------------------------------------------------- workload

WorkloadConfig random_workload(Rng& rng) {
  WorkloadConfig w;
  w.num_requests = uniform_int(rng, 1, 400);
  w.qps = std::exp(uniform(rng, std::log(0.05), std::log(100.0)));
  w.zipf_theta = uniform(rng, 0.0, 2.0);
  w.len_min = uniform_int(rng, 2, 3000);
  w.len_max = uniform_int(rng, w.len_min, 4096);
  w.pd_ratio = std::exp(uniform(rng, std::log(0.02), std::log(50.0)));
  w.max_tokens = 4096;
  w.seed = rng();
  return w;
}

std::string workload_determinism(Rng& rng) {
  const auto w = random_workload(rng);
  const auto a = generate(w);
  const auto b = generate(w);
  if (a != b) return "two generations differ";
  return {};
}

std::string workload_arrivals_sorted(Rng& rng) {
  const auto trace = generate(random_workload(rng));
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].arrival_time_s < trace[i - 1].arrival_time_s) {
      return "arrival " + std::to_string(i) + " precedes its predecessor";
    }
  }
  return {};
}

std::string workload_pd_ratio(Rng& rng) {
  auto w = random_workload(rng);
  w.len_min = uniform_int(rng, 512, 4096);
  w.len_max = uniform_int(rng, w.len_min, 4096);
  const auto trace = generate(w);
  double p = 0, d = 0;
  for (const auto& r : trace) {
    p += r.prefill_tokens;
    d += r.decode_tokens;
    if (r.total_tokens() < w.len_min || r.total_tokens() > w.len_max) return "length outside range";
  }
  if (!close(p / d, w.pd_ratio, 0.05)) return fmt("prefill/decode", p / d, w.pd_ratio);
  return {};
}

// ---------------------------------------------------------------- engine

std::string engine_work_conservation(Rng& rng) {
  const auto cluster = fixtures::random_cluster(rng);
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens);
  const auto sim = run(trace, cluster);
  double total = 0;
  // each iteration's FLOPs are split over its PP stage records
  for (const auto& r : sim.records) total += r.flops();
  const double want = oracle::trace_flops(cluster.model, trace);
  if (!close(total, want, 1e-3)) return fmt("stage FLOPs", total, want);
  return {};
}

std::string engine_compute_bound_mfu(Rng& rng) {
  auto cluster = fixtures::random_cluster(rng);
  cluster.stage_overhead_s = 0.0;
  cluster.gpu.mem_bandwidth = 1e300;  // memory term never binds
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens);
  const auto sim = run(trace, cluster);
  for (const auto& r : sim.records) {
    if (!close(r.mfu_pct, cluster.roofline_efficiency * 100.0, 1e-9)) {
      return fmt("stage MFU", r.mfu_pct, cluster.roofline_efficiency * 100.0);
    }
  }
  return {};
}

std::string engine_batch_cap_makespan(Rng& rng) {
  auto cluster = fixtures::random_cluster(rng);
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens, 80);
  const int small = 1 << uniform_int(rng, 0, 5);
  const int large = small << uniform_int(rng, 1, 3);
  cluster.batch_cap = small;
  const double a = run(trace, cluster).summary.makespan_s;
  cluster.batch_cap = large;
  const double b = run(trace, cluster).summary.makespan_s;
  if (b > a * 1.01) {
    return fmt(("makespan at cap " + std::to_string(large) + " vs " + std::to_string(small)).c_str(),
               b, a);
  }
  return {};
}

std::string engine_records_ordered(Rng& rng) {
  const auto cluster = fixtures::random_cluster(rng);
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens);
  const auto sim = run(trace, cluster);
  std::vector<const BatchStageRecord*> last(static_cast<std::size_t>(cluster.replicas), nullptr);
  for (const auto& r : sim.records) {
    auto& prev = last[static_cast<std::size_t>(r.replica_id)];
    if (prev) {
      if (r.start_time_s < prev->start_time_s) return "records out of start order";
      if (r.start_time_s < prev->end_time_s() - 1e-12 * std::max(1.0, r.start_time_s)) {
        return "records overlap on replica " + std::to_string(r.replica_id);
      }
    }
    prev = &r;
  }
  return {};
}

std::string engine_topology(Rng& rng) {
  const auto cluster = fixtures::random_cluster(rng);
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens);
  const auto sim = run(trace, cluster);
  std::vector<std::vector<int>> seen(static_cast<std::size_t>(cluster.replicas),
                                     std::vector<int>(static_cast<std::size_t>(cluster.pipeline_parallel), 0));
  for (const auto& r : sim.records) {
    if (r.replica_id < 0 || r.replica_id >= cluster.replicas) return "replica id out of range";
    if (r.stage_id < 0 || r.stage_id >= cluster.pipeline_parallel) return "stage id out of range";
    seen[static_cast<std::size_t>(r.replica_id)][static_cast<std::size_t>(r.stage_id)]++;
  }
  // replicas that received work run every pipeline stage equally often
  for (std::size_t rep = 0; rep < seen.size(); ++rep) {
    if (rep < trace.size()) {
      for (int n : seen[rep]) {
        if (n == 0 || n != seen[rep][0]) return "uneven stage records on replica " + std::to_string(rep);
      }
    }
  }
  PowerOptions opt;
  const auto samples = stages_to_power(sim.records, cluster, opt);
  const auto e = energy(samples, cluster, 1.0);
  const double want_hours = sim.summary.makespan_s / 3600.0 * cluster.gpu_count();
  if (!close(e.gpu_hours, want_hours, 1e-12)) return fmt("gpu hours", e.gpu_hours, want_hours);
  return {};
}

std::string engine_flops_oracle(Rng& rng) {
  const auto m = fixtures::tiny_model(rng);
  std::vector<TokenWork> batch;
  double want = 0;
  const int n = uniform_int(rng, 1, 16);
  for (int i = 0; i < n; ++i) {
    const int p = uniform_int(rng, 1, 300);
    // a lone prefill chunk, or one decode token at some context past the prompt
    if (uniform_int(rng, 0, 1)) {
      batch.push_back({p, p});
      want += oracle::request_flops(m, p, 0);
    } else {
      const int j = uniform_int(rng, 1, 50);
      batch.push_back({1, p + j});
      want += oracle::request_flops(m, p, j) - oracle::request_flops(m, p, j - 1);
    }
  }
  const auto got = flops_for_stage(m, batch).total();
  if (!close(got, want, 1e-9)) return fmt("batch FLOPs", got, want);
  return {};
}

// ---------------------------------------------------------------- power

std::string power_monotone(Rng& rng) {
  const auto g = random_gpu(rng);
  double a = uniform(rng, 0.0, 1.0), b = uniform(rng, 0.0, 1.0);
  if (a > b) std::swap(a, b);
  if (power_of_mfu(g, a) > power_of_mfu(g, b)) return fmt("P(a) > P(b)", power_of_mfu(g, a), power_of_mfu(g, b));
  return {};
}

std::string power_bounds(Rng& rng) {
  const auto g = random_gpu(rng);
  for (int i = 0; i < 50; ++i) {
    const double mfu = uniform(rng, 0.0, 1.0);
    const double p = power_of_mfu(g, mfu);
    if (p < g.p_idle_w || p > g.p_max_w) return fmt("P outside [idle, max]", p, g.p_idle_w);
    const double want = oracle::power(g.p_idle_w, g.p_max_w, g.mfu_sat, g.gamma, mfu);
    if (!close(p, want, 1e-12)) return fmt("P(mfu)", p, want);
  }
  return {};
}

std::string power_concave(Rng& rng) {
  const auto g = random_gpu(rng);
  constexpr int grid = 40;
  for (int i = 0; i <= grid; ++i) {
    for (int j = i + 1; j <= grid; ++j) {
      const double a = g.mfu_sat * i / grid, b = g.mfu_sat * j / grid;
      const double lam = uniform(rng, 0.0, 1.0);
      const double lhs = power_of_mfu(g, lam * a + (1 - lam) * b);
      const double rhs = lam * power_of_mfu(g, a) + (1 - lam) * power_of_mfu(g, b);
      if (lhs < rhs - 1e-9 * g.p_max_w) return fmt("concavity", lhs, rhs);
    }
  }
  return {};
}

std::string power_plateau(Rng& rng) {
  const auto g = random_gpu(rng);
  const double mfu = uniform(rng, g.mfu_sat, 1.5);
  if (power_of_mfu(g, mfu) != g.p_max_w) return fmt("P above saturation", power_of_mfu(g, mfu), g.p_max_w);
  return {};
}

// ---------------------------------------------------------------- accounting

std::vector<PowerSample> random_samples(Rng& rng, int n, double horizon) {
  std::vector<PowerSample> s;
  for (int i = 0; i < n; ++i) {
    const double start = uniform(rng, 0.0, horizon);
    s.push_back({start, uniform(rng, 1e-3, horizon / 4), uniform(rng, 0.0, 1000.0)});
  }
  return s;
}

std::string accounting_additivity(Rng& rng) {
  ClusterConfig cluster;
  cluster.gpu = builtin_gpu("h100-sxm5");
  cluster.model = builtin_model("phi-2");
  const auto samples = random_samples(rng, uniform_int(rng, 2, 200), 5000.0);
  const double pue = uniform(rng, 1.0, 2.0);
  const double whole = energy(samples, cluster, pue).e_op_kwh;
  std::vector<std::size_t> cuts{0, samples.size()};
  for (int k = uniform_int(rng, 1, 5); k > 0; --k) {
    cuts.push_back(static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(samples.size()) - 1)));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double parts = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    parts += energy(std::span(samples).subspan(cuts[i], cuts[i + 1] - cuts[i]), cluster, pue).e_op_kwh;
  }
  if (!close(parts, whole, 1e-9)) return fmt("sum of parts", parts, whole);
  return {};
}

std::string accounting_idle_lower_bound(Rng& rng) {
  const auto cluster = fixtures::random_cluster(rng);
  const auto trace = fixtures::random_trace(rng, cluster.max_tokens);
  const auto sim = run(trace, cluster);
  const double pue = uniform(rng, 1.0, 2.0);
  const auto e = energy(stages_to_power(sim.records, cluster), cluster, pue);
  const double floor_kwh = cluster.gpu.p_idle_w * cluster.gpu_count() * sim.summary.makespan_s *
                           pue / 3.6e6;
  if (e.e_op_kwh < floor_kwh * (1 - 1e-12)) return fmt("e_op below idle floor", e.e_op_kwh, floor_kwh);
  return {};
}

std::string accounting_request_scaling(Rng& rng) {
  static const char* models[] = {"phi-2", "llama-2-7b", "llama-3-8b"};
  ClusterConfig cluster;
  cluster.gpu = builtin_gpu("a100-sxm4-80g");
  cluster.model = builtin_model(models[uniform_int(rng, 0, 2)]);
  cluster.stage_overhead_s = 0.0015;
  WorkloadConfig w;
  w.qps = std::exp(uniform(rng, std::log(0.5), std::log(12.6)));
  w.seed = rng();
  w.num_requests = 1 << 11;
  const auto e1 = energy(stages_to_power(run(generate(w), cluster).records, cluster), cluster, 1.2);
  w.num_requests = 1 << 12;
  const auto e2 = energy(stages_to_power(run(generate(w), cluster).records, cluster), cluster, 1.2);
  const double ratio = e2.e_op_kwh / e1.e_op_kwh;
  if (std::abs(ratio - 2.0) > 0.2) return fmt("energy ratio", ratio, 2.0);
  if (!close(e2.mean_gpu_power_w, e1.mean_gpu_power_w, 0.05)) {
    return fmt("mean power", e2.mean_gpu_power_w, e1.mean_gpu_power_w);
  }
  return {};
}

// ---------------------------------------------------------------- signal

std::string signal_energy_preservation(Rng& rng) {
  const double res = uniform_int(rng, 1, 300);
  const int bins = uniform_int(rng, 1, 50);
  const double t0 = res * uniform_int(rng, 0, 100);
  std::vector<PowerSample> samples;
  double joules = 0;
  // hole-free layers, each tiling [t0, t0 + bins * res)
  for (int layer = uniform_int(rng, 1, 4); layer > 0; --layer) {
    double t = t0;
    const double end = t0 + bins * res;
    while (t < end) {
      const double d = std::min(end - t, uniform(rng, 0.01, 2.0 * res));
      const double w = uniform(rng, 0.0, 800.0);
      samples.push_back({t, d, w});
      joules += w * d;
      t += d;
    }
  }
  BinOptions opt;
  opt.resolution = std::chrono::seconds{static_cast<int>(res)};
  opt.fill = EmptyBinFill::Zero;
  const auto series = bin_power(samples, opt);
  double binned = 0;
  for (double v : series.values) binned += v * res;
  if (!close(binned, joules, 1e-6)) return fmt("binned joules", binned, joules);
  return {};
}

std::string signal_split_invariance(Rng& rng) {
  const double res = uniform_int(rng, 1, 120);
  auto samples = random_samples(rng, uniform_int(rng, 1, 30), res * uniform_int(rng, 1, 20));
  BinOptions opt;
  opt.resolution = std::chrono::seconds{static_cast<int>(res)};
  opt.fill = EmptyBinFill::IdleFloor;
  opt.idle_floor_w = 42.0;
  const auto before = bin_power(samples, opt);
  const std::size_t i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(samples.size()) - 1));
  const auto s = samples[i];
  const double cut = uniform(rng, 0.0, s.duration_s);
  if (cut <= 0 || cut >= s.duration_s) return {};
  samples[i].duration_s = cut;
  samples.push_back({s.start_time_s + cut, s.duration_s - cut, s.watts});
  const auto after = bin_power(samples, opt);
  if (before.values.size() != after.values.size() || before.start != after.start) return "bin grid changed";
  for (std::size_t b = 0; b < before.values.size(); ++b) {
    if (!close(before.values[b], after.values[b], 1e-9, 1e-9)) return fmt("bin after split", after.values[b], before.values[b]);
  }
  return {};
}

std::string signal_bin_oracle(Rng& rng) {
  const double res = uniform_int(rng, 1, 120);
  const auto samples = random_samples(rng, uniform_int(rng, 1, 25), res * uniform_int(rng, 1, 15));
  BinOptions opt;
  opt.resolution = std::chrono::seconds{static_cast<int>(res)};
  opt.fill = EmptyBinFill::IdleFloor;
  opt.idle_floor_w = 17.0;
  const auto got = bin_power(samples, opt);
  const double first = std::chrono::duration<double>(got.start - opt.epoch).count();
  const auto want = oracle::binned(samples, first, res, got.values.size(), 17.0);
  for (std::size_t b = 0; b < want.size(); ++b) {
    if (!close(got.values[b], want[b], 1e-9, 1e-9)) return fmt(("bin " + std::to_string(b)).c_str(), got.values[b], want[b]);
  }
  return {};
}

std::string signal_resample_identity(Rng& rng) {
  EnvTrace t;
  t.kind = EnvKind::CarbonIntensity;
  const std::chrono::seconds res{uniform_int(rng, 1, 3600)};
  const int n = uniform_int(rng, 1, 200);
  const auto start = fixtures::day_start() + res * uniform_int(rng, 0, 100);
  for (int i = 0; i < n; ++i) {
    t.timestamps.push_back(start + res * i);
    t.values.push_back(uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform(rng, 0.0, 900.0));
  }
  for (auto m : {Interpolation::Nearest, Interpolation::Linear, Interpolation::Cubic}) {
    const auto r = resample_env(t, res, start, start + res * n, {m, false});
    if (r.values.size() != t.values.size()) return "resampled length differs";
    for (int i = 0; i < n; ++i) {
      if (!close(r.values[i], t.values[i], 1e-9, 1e-9)) return fmt("resampled knot", r.values[i], t.values[i]);
    }
  }
  return {};
}

// ---------------------------------------------------------------- grid

std::string grid_power_balance(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 400)));
  s.policy = uniform_int(rng, 0, 1) ? GridPolicy::CarbonThreshold : GridPolicy::Passive;
  const auto r = cosimulate(s);
  for (const auto& st : r.steps) {
    const double residual = st.load_w - (st.solar_w + st.battery_w + st.grid_w);
    if (std::abs(residual) > 1e-9) return fmt("power balance residual", residual, 0.0);
  }
  return {};
}

std::string grid_soc_bounds(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 400)));
  s.policy = uniform_int(rng, 0, 1) ? GridPolicy::CarbonThreshold : GridPolicy::Passive;
  const auto r = cosimulate(s);
  const auto& b = s.battery;
  const double dt_h = s.step.count() / 3600.0;
  const double max_step = std::max(b.max_charge_w * b.round_trip_efficiency, b.max_discharge_w) * dt_h / b.capacity_wh;
  double prev = b.soc_init;
  for (const auto& st : r.steps) {
    if (st.soc < b.soc_min || st.soc > b.soc_max) return fmt("soc outside bounds", st.soc, b.soc_min);
    if (std::abs(st.soc - prev) > max_step * (1 + 1e-12) + 1e-15) return fmt("soc jump", std::abs(st.soc - prev), max_step);
    prev = st.soc;
  }
  return {};
}

std::string grid_energy_conservation(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 400)));
  s.policy = uniform_int(rng, 0, 1) ? GridPolicy::CarbonThreshold : GridPolicy::Passive;
  const auto r = cosimulate(s);
  const auto& rep = r.report;
  const double in = rep.grid_import_kwh + rep.solar_gen_kwh + rep.battery_discharge_kwh;
  const double out = rep.total_demand_kwh + rep.grid_export_kwh + rep.battery_charge_kwh;
  if (!close(in, out, 1e-6, 1e-12)) return fmt("bus energy", in, out);
  // what the battery kept: charge after losses minus discharge
  const double losses = rep.battery_charge_kwh * (1 - s.battery.round_trip_efficiency);
  const double stored = (r.steps.back().soc - s.battery.soc_init) * s.battery.capacity_wh / 1000.0;
  const double want = rep.battery_charge_kwh - losses - rep.battery_discharge_kwh;
  if (!close(stored, want, 1e-6, 1e-9)) return fmt("stored energy", stored, want);
  return {};
}

std::string grid_solar_monotone(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 300)));
  s.policy = GridPolicy::Passive;
  const double a = cosimulate(s).report.renewable_share_pct;
  s.solar_capacity_w *= uniform(rng, 1.0, 3.0);
  s.solar_capacity_w += uniform(rng, 0.0, 100.0);
  const double b = cosimulate(s).report.renewable_share_pct;
  if (b < a - 1e-9) return fmt("renewable share after adding solar", b, a);
  return {};
}

std::string grid_policy_never_worse(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 400)));
  s.policy = GridPolicy::Passive;
  const double passive = cosimulate(s).report.net_footprint_g;
  s.policy = GridPolicy::CarbonThreshold;
  const double policy = cosimulate(s).report.net_footprint_g;
  if (policy > passive * (1 + 1e-12) + 1e-9) return fmt("policy footprint", policy, passive);
  return {};
}

std::string grid_step_oracle(Rng& rng) {
  auto s = fixtures::random_grid(rng, static_cast<std::size_t>(uniform_int(rng, 10, 400)));
  s.policy = GridPolicy::Passive;
  const auto r = cosimulate(s);
  std::vector<double> solar, ci;
  for (const auto& st : r.steps) {
    solar.push_back(st.solar_w);
    ci.push_back(st.ci);
  }
  const auto rows = oracle::passive_steps(s.load.values, solar, ci, s.battery, 60.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& a = r.steps[k];
    const auto& b = rows[k];
    if (!close(a.battery_w, b.battery_w, 1e-6, 1e-9) || !close(a.grid_w, b.grid_w, 1e-6, 1e-9) ||
        !close(a.soc, b.soc, 1e-6, 1e-12) || !close(a.step_emissions_g, b.emissions_g, 1e-6, 1e-12)) {
      return "step " + std::to_string(k) + " differs from the hand recomputation";
    }
  }
  return {};
}

// ---------------------------------------------------------------- cli

std::string report_text(const PipelineResult& r) {
  std::ostringstream os;
  write_sim_summary(os, r.sim.summary);
  write_energy_report(os, r.power.energy);
  write_carbon_report(os, r.power.carbon);
  if (r.cosim) write_cosim_report(os, r.cosim->report);
  return os.str();
}

std::string cli_reproducible(Rng& rng) {
  auto c = fixtures::small_scenario(rng(), uniform_int(rng, 1, 40));
  c.workload.qps = uniform(rng, 0.05, 20.0);
  c.finalize();
  const auto a = run_pipeline(c);
  const auto b = run_pipeline(c);
  if (report_text(a) != report_text(b)) return "report text differs between runs";
  if (a.sim.records != b.sim.records) return "stage records differ between runs";
  return {};
}

std::string cli_composable(Rng& rng) {
  auto c = fixtures::small_scenario(rng(), uniform_int(rng, 1, 40));
  c.workload.qps = uniform(rng, 0.05, 20.0);
  if (uniform_int(rng, 0, 1)) c.integration->policy = GridPolicy::CarbonThreshold;
  c.finalize();
  const auto whole = run_pipeline(c);

  const auto dir = fixtures::scratch_dir("compose");
  write_stage_csv(dir / "stages.csv", run(generate(c.workload), c.cluster).records);
  const auto p = power_stage(read_stage_csv(dir / "stages.csv"), c);
  export_load_profile(p.load, dir / "load.csv");
  const auto load = import_load_profile(dir / "load.csv", c.resolution);
  const auto cosim = cosimulate(make_grid_scenario(load, *c.integration));
  std::filesystem::remove_all(dir);

  std::ostringstream a, b;
  write_energy_report(a, whole.power.energy);
  write_cosim_report(a, whole.cosim->report);
  write_energy_report(b, p.energy);
  write_cosim_report(b, cosim.report);
  if (a.str() != b.str()) return "file chain and in-process reports differ";
  return {};
}

}  // namespace

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"profiles", "power curve endpoints", cases_of(profiles_power_endpoints)},
      {"profiles", "parameter count reconstruction", cases_of(profiles_param_reconstruction)},
      {"workload", "determinism", cases_of(workload_determinism)},
      {"workload", "arrivals nondecreasing", cases_of(workload_arrivals_sorted)},
      {"workload", "prefill:decode ratio", cases_of(workload_pd_ratio)},
      {"engine", "work conservation", cases_of(engine_work_conservation)},
      {"engine", "compute-bound MFU equals efficiency", cases_of(engine_compute_bound_mfu)},
      {"engine", "batch cap never lengthens makespan", cases_of(engine_batch_cap_makespan)},
      {"engine", "records ordered and disjoint", cases_of(engine_records_ordered)},
      {"engine", "topology and GPU count", cases_of(engine_topology)},
      {"engine", "batch FLOPs match matrix shapes", cases_of(engine_flops_oracle)},
      {"power", "monotone", cases_of(power_monotone)},
      {"power", "bounded and matches scalar curve", cases_of(power_bounds)},
      {"power", "concave below saturation", cases_of(power_concave)},
      {"power", "saturation plateau", cases_of(power_plateau)},
      {"accounting", "energy additivity", cases_of(accounting_additivity)},
      {"accounting", "idle lower bound", cases_of(accounting_idle_lower_bound)},
      {"accounting", "request-count scaling", cases_of(accounting_request_scaling)},
      {"signal", "energy preservation", cases_of(signal_energy_preservation)},
      {"signal", "split invariance", cases_of(signal_split_invariance)},
      {"signal", "bins match sweep-line recomputation", cases_of(signal_bin_oracle)},
      {"signal", "resample to own grid is identity", cases_of(signal_resample_identity)},
      {"grid", "power balance", cases_of(grid_power_balance)},
      {"grid", "soc bounds and continuity", cases_of(grid_soc_bounds)},
      {"grid", "energy conservation", cases_of(grid_energy_conservation)},
      {"grid", "more solar never lowers renewable share", cases_of(grid_solar_monotone)},
      {"grid", "threshold policy never worse than passive", cases_of(grid_policy_never_worse)},
      {"grid", "passive steps match hand recomputation", cases_of(grid_step_oracle)},
      {"cli", "reproducible", cases_of(cli_reproducible)},
      {"cli", "file chain equals in-process run", cases_of(cli_composable)},
  };
  return entries;
}

Outcome run(const Entry& entry, int cases, std::uint64_t seed) {
  Outcome o = entry.run(cases, seed);
  o.module = entry.module;
  o.name = entry.name;
  return o;
}

}  // namespace invariants
