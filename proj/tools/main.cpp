// ecoinfer command-line front end.
//
//   ecoinfer simulate   [--config F] [--out D] [--seed N] [overrides]
//   ecoinfer power      [--stages out/stages.csv]
//   ecoinfer cosim      [--load out/load_profile.csv] [--solar F] [--ci-trace F]
//   ecoinfer experiment <requests|pd-ratio|batch-size|qps|parallelism> [--jobs N]
//   ecoinfer report     (full pipeline, or --sweep F to re-plot a sweep)
//
// Exit codes: 0 ok, 2 configuration error, 3 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ecoinfer/accounting.hpp"
#include "ecoinfer/error.hpp"
#include "ecoinfer/experiments.hpp"
#include "ecoinfer/pipeline.hpp"
#include "ecoinfer/plot.hpp"
#include "ecoinfer/scenario.hpp"

namespace fs = std::filesystem;
using namespace ecoinfer;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;

  // inference overrides
  std::optional<std::string> device, model;
  std::optional<int> tp, pp, replicas, batch_cap, max_tokens, len_min, len_max;
  std::optional<std::int64_t> requests, resolution_s;
  std::optional<double> qps, zipf_theta, pd_ratio, pue, ci, roofline_efficiency,
      stage_overhead_s;
  std::optional<std::string> empty_bin_fill;
  bool no_idle_fill = false;

  // integration overrides
  std::optional<std::string> solar, ci_trace, policy, interpolation;
  std::optional<double> solar_capacity_w, battery_wh, ci_low, ci_high;
  bool extrapolate = false;
  bool no_integration = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "scenario JSON file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--device", o.device, "GPU profile name");
  cmd->add_option("--model", o.model, "model profile name");
  cmd->add_option("--tp", o.tp, "tensor-parallel degree");
  cmd->add_option("--pp", o.pp, "pipeline-parallel degree");
  cmd->add_option("--replicas", o.replicas, "replica count");
  cmd->add_option("--batch-cap", o.batch_cap, "max requests per batch");
  cmd->add_option("--max-tokens", o.max_tokens, "per-request token limit");
  cmd->add_option("--requests", o.requests, "number of requests");
  cmd->add_option("--qps", o.qps, "Poisson arrival rate");
  cmd->add_option("--zipf-theta", o.zipf_theta, "length distribution exponent");
  cmd->add_option("--len-min", o.len_min, "minimum request length");
  cmd->add_option("--len-max", o.len_max, "maximum request length");
  cmd->add_option("--pd-ratio", o.pd_ratio, "prefill:decode ratio");
  cmd->add_option("--pue", o.pue, "power usage effectiveness");
  cmd->add_option("--ci", o.ci, "static carbon intensity, gCO2/kWh");
  cmd->add_option("--roofline-efficiency", o.roofline_efficiency, "achievable fraction of peak");
  cmd->add_option("--stage-overhead", o.stage_overhead_s, "fixed seconds per batch stage");
  cmd->add_option("--resolution", o.resolution_s, "load profile bin width, seconds");
  cmd->add_option("--empty-bin-fill", o.empty_bin_fill, "idle or zero");
  cmd->add_flag("--no-idle-fill", o.no_idle_fill, "do not fill idle gaps with idle power");
  cmd->add_option("--solar", o.solar, "solar trace CSV");
  cmd->add_option("--ci-trace", o.ci_trace, "carbon-intensity trace CSV");
  cmd->add_option("--policy", o.policy, "passive or carbon-threshold");
  cmd->add_option("--interpolation", o.interpolation, "nearest, linear or cubic");
  cmd->add_option("--solar-capacity", o.solar_capacity_w, "solar peak watts");
  cmd->add_option("--battery-wh", o.battery_wh, "battery capacity, Wh");
  cmd->add_option("--ci-low", o.ci_low, "charge-from-grid threshold");
  cmd->add_option("--ci-high", o.ci_high, "discharge threshold");
  cmd->add_flag("--extrapolate", o.extrapolate, "hold trace edge values past coverage");
  cmd->add_flag("--no-integration", o.no_integration, "skip the co-simulation stage");
}

// Builtin defaults, then the config file, then flags, as one JSON overlay so
// flags and keys share validation.
ScenarioConfig build_config(const CommonOptions& o) {
  ScenarioConfig c = default_scenario();
  if (!o.config.empty()) c = load_scenario(o.config);

  nlohmann::json inf = nlohmann::json::object();
  auto put = [](nlohmann::json& j, const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put(inf, "device", o.device);
  put(inf, "model", o.model);
  put(inf, "tp", o.tp);
  put(inf, "pp", o.pp);
  put(inf, "replicas", o.replicas);
  put(inf, "batch_cap", o.batch_cap);
  put(inf, "max_tokens", o.max_tokens);
  put(inf, "requests", o.requests);
  put(inf, "qps", o.qps);
  put(inf, "zipf_theta", o.zipf_theta);
  put(inf, "len_min", o.len_min);
  put(inf, "len_max", o.len_max);
  put(inf, "pd_ratio", o.pd_ratio);
  put(inf, "pue", o.pue);
  put(inf, "ci", o.ci);
  put(inf, "roofline_efficiency", o.roofline_efficiency);
  put(inf, "stage_overhead_s", o.stage_overhead_s);
  put(inf, "resolution_s", o.resolution_s);
  put(inf, "empty_bin_fill", o.empty_bin_fill);
  if (o.no_idle_fill) inf["idle_fill"] = false;

  nlohmann::json doc = nlohmann::json::object();
  if (!inf.empty()) doc["inference"] = inf;
  if (o.seed) doc["seed"] = *o.seed;

  if (o.no_integration) {
    doc["integration"] = nullptr;
  } else {
    nlohmann::json g = nlohmann::json::object();
    put(g, "solar_trace", o.solar);
    put(g, "ci_trace", o.ci_trace);
    put(g, "policy", o.policy);
    if (o.interpolation) {
      g["solar_interpolation"] = *o.interpolation;
      g["ci_interpolation"] = *o.interpolation;
    }
    put(g, "solar_capacity_w", o.solar_capacity_w);
    put(g, "ci_low", o.ci_low);
    put(g, "ci_high", o.ci_high);
    if (o.battery_wh) g["battery"] = {{"capacity_wh", *o.battery_wh}};
    if (o.extrapolate) g["extrapolate"] = true;
    // keep the co-simulation step in lockstep with the bin width
    if (o.resolution_s) g["step_s"] = *o.resolution_s;
    if (!g.empty()) doc["integration"] = g;
  }

  apply_json(c, doc, fs::current_path());
  if (!o.out.empty()) c.output_dir = o.out;
  c.finalize();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string sim_text(const SimSummary& s) {
  std::ostringstream os;
  write_sim_summary(os, s);
  return os.str();
}

std::string energy_text(const EnergyReport& e, const CarbonReport& c) {
  std::ostringstream os;
  write_energy_report(os, e);
  write_carbon_report(os, c);
  return os.str();
}

std::string cosim_text(const CosimReport& r) {
  std::ostringstream os;
  write_cosim_report(os, r);
  return os.str();
}

void plot_load(const PowerSeries& load, const fs::path& path) {
  plot::Series s{"cluster load", {}, {}};
  for (std::size_t i = 0; i < load.values.size(); ++i) {
    s.x.push_back(static_cast<double>(i) * static_cast<double>(load.resolution.count()) / 60.0);
    s.y.push_back(load.values[i]);
  }
  std::vector<plot::Panel> panels{{"Binned cluster power", "minutes", "W", false, {s}}};
  plot::write_svg(path, "Load profile", panels, 1);
}

void plot_cosim(const std::vector<StepState>& steps, const fs::path& path) {
  if (steps.empty()) return;
  const auto t0 = steps.front().time;
  plot::Series load{"load", {}, {}}, solar{"solar", {}, {}}, grid{"grid", {}, {}},
      battery{"battery", {}, {}}, soc{"soc", {}, {}}, ci{"ci", {}, {}};
  for (const auto& s : steps) {
    const double h = std::chrono::duration<double>(s.time - t0).count() / 3600.0;
    for (auto* series : {&load, &solar, &grid, &battery, &soc, &ci}) series->x.push_back(h);
    load.y.push_back(s.load_w);
    solar.y.push_back(s.solar_w);
    grid.y.push_back(s.grid_w);
    battery.y.push_back(s.battery_w);
    soc.y.push_back(100.0 * s.soc);
    ci.y.push_back(s.ci);
  }
  std::vector<plot::Panel> panels{
      {"Power flows", "hours", "W", false, {load, solar, grid, battery}},
      {"Battery state of charge", "hours", "%", false, {soc}},
      {"Grid carbon intensity", "hours", "gCO2/kWh", false, {ci}},
  };
  plot::write_svg(path, "Microgrid co-simulation", panels, 2);
}

int cmd_simulate(const CommonOptions& o) {
  const auto c = build_config(o);
  const auto requests = generate(c.workload);
  const auto sim = run(requests, c.cluster);
  write_trace_csv(c.output_dir / "trace.csv", requests);
  write_stage_csv(c.output_dir / "stages.csv", sim.records);
  const auto text = sim_text(sim.summary);
  write_text(c.output_dir / "sim_summary.txt", text);
  std::cout << text;
  return 0;
}

int cmd_power(const CommonOptions& o, const std::string& stages_path) {
  const auto c = build_config(o);
  const fs::path stages = stages_path.empty() ? c.output_dir / "stages.csv" : fs::path(stages_path);
  const auto records = read_stage_csv(stages);
  const auto p = power_stage(records, c);
  export_load_profile(p.load, c.output_dir / "load_profile.csv");
  const auto text = energy_text(p.energy, p.carbon);
  write_text(c.output_dir / "energy_report.txt", text);
  std::cout << text;
  return 0;
}

int cmd_cosim(const CommonOptions& o, const std::string& load_path) {
  const auto c = build_config(o);
  if (!c.integration) throw ConfigError("cosim needs an integration section or trace flags");
  const fs::path load_file = load_path.empty() ? c.output_dir / "load_profile.csv" : fs::path(load_path);
  const auto load = import_load_profile(load_file, c.resolution);
  auto g = *c.integration;
  if (g.step != load.resolution) {
    throw ConfigError("load profile resolution (" + std::to_string(load.resolution.count()) +
                      " s) differs from integration step_s (" +
                      std::to_string(g.step.count()) + " s)");
  }
  const auto result = cosimulate(make_grid_scenario(load, g));
  write_step_log(c.output_dir / "steps.csv", result.steps);
  const auto text = cosim_text(result.report);
  write_text(c.output_dir / "cosim_report.txt", text);
  std::cout << text;
  return 0;
}

int cmd_experiment(const CommonOptions& o, const std::string& name, int jobs,
                   std::optional<std::int64_t> requests_override) {
  const auto experiment = parse_experiment(name);
  auto c = build_config(o);
  SweepOptions options;
  options.jobs = jobs;
  options.requests = requests_override;
  const auto points = run_experiment(experiment, c, options);
  const auto stem = c.output_dir / ("experiment_" + std::string(to_string(experiment)));
  write_sweep_csv(stem.string() + ".csv", points);
  plot_experiment(experiment, points, stem.string() + ".svg");
  std::printf("%-14s %3s %3s %5s %7s %8s %7s %5s %10s %11s %8s\n", "model", "tp", "pp", "cap",
              "reqs", "qps", "pd", "len", "power_w", "energy_kwh", "mfu_pct");
  for (const auto& p : points) {
    std::printf("%-14s %3d %3d %5d %7lld %8.3f %7.2f %5d %10.2f %11.5f %8.2f\n", p.model.c_str(),
                p.tp, p.pp, p.batch_cap, static_cast<long long>(p.requests), p.qps, p.pd_ratio,
                p.length, p.mean_gpu_power_w, p.energy_kwh, p.mean_mfu_pct);
  }
  return 0;
}

int cmd_report(const CommonOptions& o, const std::string& sweep) {
  const auto c = build_config(o);
  if (!sweep.empty()) {
    const auto points = read_sweep_csv(sweep);
    if (points.empty()) throw DataError(sweep + ": no rows");
    const auto experiment = parse_experiment(points.front().experiment);
    fs::path svg = fs::path(sweep).replace_extension(".svg");
    plot_experiment(experiment, points, svg);
    std::cout << "wrote " << svg.string() << '\n';
    return 0;
  }

  const auto r = run_pipeline(c);
  write_trace_csv(c.output_dir / "trace.csv", r.requests);
  write_stage_csv(c.output_dir / "stages.csv", r.sim.records);
  export_load_profile(r.power.load, c.output_dir / "load_profile.csv");
  plot_load(r.power.load, c.output_dir / "load_profile.svg");

  std::string text = "[simulation]\n" + sim_text(r.sim.summary) + "[energy]\n" +
                     energy_text(r.power.energy, r.power.carbon);
  if (r.cosim) {
    write_step_log(c.output_dir / "steps.csv", r.cosim->steps);
    plot_cosim(r.cosim->steps, c.output_dir / "cosim.svg");
    text += "[cosim]\n" + cosim_text(r.cosim->report);
  }
  write_text(c.output_dir / "report.txt", text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM inference energy, carbon and microgrid co-simulation"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string stages_path, load_path, experiment_name, sweep_path;
  int jobs = 1;
  std::optional<std::int64_t> sweep_requests;

  auto* simulate = app.add_subcommand("simulate", "generate a workload and simulate serving it");
  add_common(simulate, opts);

  auto* power = app.add_subcommand("power", "stage records -> load profile and energy report");
  add_common(power, opts);
  power->add_option("--stages", stages_path, "stage-record CSV (default <out>/stages.csv)");

  auto* cosim = app.add_subcommand("cosim", "load profile -> microgrid co-simulation");
  add_common(cosim, opts);
  cosim->add_option("--load", load_path, "load-profile CSV (default <out>/load_profile.csv)");

  auto* experiment = app.add_subcommand("experiment", "run a scripted parameter sweep");
  add_common(experiment, opts);
  experiment->add_option("name", experiment_name,
                         "requests, pd-ratio, batch-size, qps or parallelism")
      ->required();
  experiment->add_option("--jobs", jobs, "grid points run in parallel")->check(CLI::PositiveNumber);
  experiment->add_option("--sweep-requests", sweep_requests,
                         "request count for every grid point (quick runs)");

  auto* report = app.add_subcommand("report", "full pipeline with reports and plots");
  add_common(report, opts);
  report->add_option("--sweep", sweep_path, "re-plot an existing sweep CSV instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(opts);
    if (*power) return cmd_power(opts, stages_path);
    if (*cosim) return cmd_cosim(opts, load_path);
    if (*experiment) return cmd_experiment(opts, experiment_name, jobs, sweep_requests);
    if (*report) return cmd_report(opts, sweep_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
