#include "ecoinfer/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"
#include "ecoinfer/pipeline.hpp"
#include "ecoinfer/plot.hpp"

namespace ecoinfer {

namespace {

constexpr std::string_view kSweepHeader =
    "experiment,model,tp,pp,batch_cap,requests,qps,pd_ratio,length,mean_gpu_power_w,energy_kwh,"
    "mean_mfu_pct,mean_batch_size,makespan_s,gpu_hours";

std::vector<SweepPoint> run_all(std::vector<ScenarioConfig> configs, Experiment experiment,
                                int jobs) {
  std::vector<SweepPoint> out(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out[i] = evaluate(configs[i]);
        out[i].experiment = std::string(to_string(experiment));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(configs.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void set_parallelism(ScenarioConfig& c, int tp, int pp) {
  c.cluster.tensor_parallel = tp;
  c.cluster.pipeline_parallel = pp;
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  if (name == "requests") return Experiment::Requests;
  if (name == "pd-ratio") return Experiment::PdRatio;
  if (name == "batch-size") return Experiment::BatchSize;
  if (name == "qps") return Experiment::Qps;
  if (name == "parallelism") return Experiment::Parallelism;
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected requests, pd-ratio, batch-size, qps or parallelism)");
}

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Requests: return "requests";
    case Experiment::PdRatio: return "pd-ratio";
    case Experiment::BatchSize: return "batch-size";
    case Experiment::Qps: return "qps";
    case Experiment::Parallelism: return "parallelism";
  }
  return "?";
}

std::vector<ModelPlacement> requests_models() {
  return {{"phi-2", 1, 1},       {"llama-2-7b", 1, 1},  {"llama-3-8b", 1, 1},
          {"codellama-34b", 1, 1}, {"llama-3-70b", 2, 2}, {"qwen-72b", 2, 2}};
}

std::vector<std::int64_t> requests_grid() {
  std::vector<std::int64_t> g;
  for (int e = 8; e <= 16; ++e) g.push_back(std::int64_t{1} << e);
  return g;
}

std::vector<double> pd_ratio_grid() { return {50.0, 10.0, 5.0, 1.0, 0.2, 0.1, 0.02}; }

std::vector<int> length_grid() { return {128, 256, 512, 1024, 2048, 4096}; }

std::vector<int> batch_cap_grid() { return {1, 2, 4, 8, 16, 32, 64, 128}; }

std::vector<double> qps_grid() {
  // 16 log-spaced points from 0.1 to 50
  std::vector<double> g;
  constexpr int n = 16;
  for (int i = 0; i < n; ++i) {
    g.push_back(0.1 * std::pow(500.0, static_cast<double>(i) / (n - 1)));
  }
  return g;
}

std::vector<int> parallel_degrees() { return {1, 2, 4}; }

SweepPoint evaluate(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  c.integration.reset();
  c.finalize();

  const auto requests = generate(c.workload);
  const auto sim = run(requests, c.cluster);
  PowerOptions options;
  options.idle_fill = c.idle_fill;
  const auto samples = stages_to_power(sim.records, c.cluster, options);
  const auto e = energy(samples, c.cluster, c.pue);

  SweepPoint p;
  p.model = c.model_name;
  p.tp = c.cluster.tensor_parallel;
  p.pp = c.cluster.pipeline_parallel;
  p.batch_cap = c.cluster.batch_cap;
  p.requests = c.workload.num_requests;
  p.qps = c.workload.qps;
  p.pd_ratio = c.workload.pd_ratio;
  p.length = c.workload.len_min == c.workload.len_max ? c.workload.len_min : 0;
  p.mean_gpu_power_w = e.mean_gpu_power_w;
  p.energy_kwh = e.e_op_kwh;
  p.mean_mfu_pct = sim.summary.mean_mfu_pct;
  p.mean_batch_size = sim.summary.mean_batch_size;
  p.makespan_s = sim.summary.makespan_s;
  p.gpu_hours = e.gpu_hours;
  return p;
}

std::vector<SweepPoint> run_experiment(Experiment experiment, const ScenarioConfig& base,
                                       const SweepOptions& options) {
  ScenarioConfig b = base;
  if (options.requests) b.workload.num_requests = *options.requests;

  std::vector<ScenarioConfig> configs;
  switch (experiment) {
    case Experiment::Requests:
      for (const auto& m : requests_models()) {
        for (auto n : requests_grid()) {
          ScenarioConfig c = b;
          c.model_name = m.model;
          set_parallelism(c, m.tp, m.pp);
          c.workload.num_requests = n;
          configs.push_back(std::move(c));
        }
      }
      break;
    case Experiment::PdRatio:
      for (int length : length_grid()) {
        for (double r : pd_ratio_grid()) {
          ScenarioConfig c = b;
          c.workload.len_min = c.workload.len_max = length;
          c.workload.pd_ratio = r;
          configs.push_back(std::move(c));
        }
      }
      break;
    case Experiment::BatchSize:
      for (int cap : batch_cap_grid()) {
        ScenarioConfig c = b;
        c.cluster.batch_cap = cap;
        configs.push_back(std::move(c));
      }
      break;
    case Experiment::Qps:
      for (double q : qps_grid()) {
        ScenarioConfig c = b;
        c.workload.qps = q;
        if (!options.requests) c.workload.num_requests = options.qps_requests;
        configs.push_back(std::move(c));
      }
      break;
    case Experiment::Parallelism:
      for (int tp : parallel_degrees()) {
        for (int pp : parallel_degrees()) {
          ScenarioConfig c = b;
          c.model_name = "codellama-34b";
          set_parallelism(c, tp, pp);
          configs.push_back(std::move(c));
        }
      }
      break;
  }
  return run_all(std::move(configs), experiment, options.jobs);
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  // Written next to the target and renamed so readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = detail::open_for_write(tmp);
    out << kSweepHeader << '\n';
    using detail::exact;
    for (const auto& p : points) {
      out << p.experiment << ',' << p.model << ',' << p.tp << ',' << p.pp << ',' << p.batch_cap
          << ',' << p.requests << ',' << exact(p.qps) << ',' << exact(p.pd_ratio) << ','
          << p.length << ',' << exact(p.mean_gpu_power_w) << ',' << exact(p.energy_kwh) << ','
          << exact(p.mean_mfu_pct) << ',' << exact(p.mean_batch_size) << ','
          << exact(p.makespan_s) << ',' << exact(p.gpu_hours) << '\n';
    }
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path) {
  detail::CsvReader reader(path);
  reader.expect_header(kSweepHeader);
  std::vector<SweepPoint> points;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 15) reader.fail("expected 15 fields");
    SweepPoint p;
    p.experiment = std::string(f[0]);
    p.model = std::string(f[1]);
    p.tp = static_cast<int>(reader.to_int(f[2], "tp"));
    p.pp = static_cast<int>(reader.to_int(f[3], "pp"));
    p.batch_cap = static_cast<int>(reader.to_int(f[4], "batch_cap"));
    p.requests = reader.to_int(f[5], "requests");
    p.qps = reader.to_double(f[6], "qps");
    p.pd_ratio = reader.to_double(f[7], "pd_ratio");
    p.length = static_cast<int>(reader.to_int(f[8], "length"));
    p.mean_gpu_power_w = reader.to_double(f[9], "mean_gpu_power_w");
    p.energy_kwh = reader.to_double(f[10], "energy_kwh");
    p.mean_mfu_pct = reader.to_double(f[11], "mean_mfu_pct");
    p.mean_batch_size = reader.to_double(f[12], "mean_batch_size");
    p.makespan_s = reader.to_double(f[13], "makespan_s");
    p.gpu_hours = reader.to_double(f[14], "gpu_hours");
    points.push_back(std::move(p));
  }
  return points;
}

void plot_experiment(Experiment experiment, const std::vector<SweepPoint>& points,
                     const std::filesystem::path& svg_path) {
  using plot::Panel;
  using plot::Series;
  std::vector<Panel> panels;

  // Groups rows into one series per key, x chosen per experiment.
  auto grouped = [&](auto key_of, auto x_of, auto y_of) {
    std::map<std::string, Series> by_key;
    std::vector<std::string> order;
    for (const auto& p : points) {
      const std::string k = key_of(p);
      if (!by_key.contains(k)) {
        order.push_back(k);
        by_key[k].label = k;
      }
      by_key[k].x.push_back(x_of(p));
      by_key[k].y.push_back(y_of(p));
    }
    std::vector<Series> out;
    for (const auto& k : order) out.push_back(by_key[k]);
    return out;
  };
  auto power = [](const SweepPoint& p) { return p.mean_gpu_power_w; };
  auto energy_of = [](const SweepPoint& p) { return p.energy_kwh; };
  auto mfu = [](const SweepPoint& p) { return p.mean_mfu_pct; };

  std::string title;
  switch (experiment) {
    case Experiment::Requests: {
      title = "Request count sweep";
      auto key = [](const SweepPoint& p) { return p.model; };
      auto x = [](const SweepPoint& p) { return static_cast<double>(p.requests); };
      panels.push_back({"Mean GPU power", "requests", "W", true, grouped(key, x, power)});
      panels.push_back({"Total energy", "requests", "kWh", true, grouped(key, x, energy_of)});
      break;
    }
    case Experiment::PdRatio: {
      title = "Prefill:decode ratio sweep";
      auto key = [](const SweepPoint& p) { return "len " + std::to_string(p.length); };
      auto x = [](const SweepPoint& p) { return p.pd_ratio; };
      panels.push_back({"Mean GPU power", "P:D ratio", "W", true, grouped(key, x, power)});
      panels.push_back({"Total energy", "P:D ratio", "kWh", true, grouped(key, x, energy_of)});
      break;
    }
    case Experiment::BatchSize: {
      title = "Batch cap sweep";
      auto key = [](const SweepPoint& p) { return p.model; };
      auto x = [](const SweepPoint& p) { return static_cast<double>(p.batch_cap); };
      panels.push_back({"Mean GPU power", "batch cap", "W", true, grouped(key, x, power)});
      panels.push_back({"Total energy", "batch cap", "kWh", true, grouped(key, x, energy_of)});
      break;
    }
    case Experiment::Qps: {
      title = "Arrival rate sweep";
      auto key = [](const SweepPoint& p) { return p.model; };
      auto x = [](const SweepPoint& p) { return p.qps; };
      panels.push_back({"Mean GPU power", "QPS", "W", true, grouped(key, x, power)});
      panels.push_back({"Total energy", "QPS", "kWh", true, grouped(key, x, energy_of)});
      panels.push_back({"Mean MFU", "QPS", "%", true, grouped(key, x, mfu)});
      break;
    }
    case Experiment::Parallelism: {
      title = "Tensor/pipeline parallelism sweep";
      auto key = [](const SweepPoint& p) { return "PP " + std::to_string(p.pp); };
      auto x = [](const SweepPoint& p) { return static_cast<double>(p.tp); };
      panels.push_back({"Mean GPU power", "TP", "W", false, grouped(key, x, power)});
      panels.push_back({"Total energy", "TP", "kWh", false, grouped(key, x, energy_of)});
      break;
    }
  }
  plot::write_svg(svg_path, title, panels, 2);
}

}  // namespace ecoinfer
