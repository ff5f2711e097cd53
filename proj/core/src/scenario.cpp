#include "ecoinfer/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "ecoinfer/error.hpp"

namespace ecoinfer {

using nlohmann::json;

namespace {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("ECOINFER_DATA_DIR")) return env;
#ifdef ECOINFER_DATA_DIR
  return ECOINFER_DATA_DIR;
#else
  return "data";
#endif
}

IntegrationConfig default_integration() {
  IntegrationConfig g;
  g.solar_trace = data_dir() / "solar_week.csv";
  g.ci_trace = data_dir() / "ci_week.csv";
  return g;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, std::string_view section) {
  if (!obj.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      target = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

GpuProfile gpu_from_json(const json& j, GpuProfile base) {
  reject_unknown(j, {"name", "p_idle_w", "p_max_w", "mfu_sat", "gamma", "peak_flops",
                     "mem_bandwidth", "phi_manuf"},
                 "profiles.gpus");
  read(j, "name", base.name);
  read(j, "p_idle_w", base.p_idle_w);
  read(j, "p_max_w", base.p_max_w);
  read(j, "mfu_sat", base.mfu_sat);
  read(j, "gamma", base.gamma);
  read(j, "peak_flops", base.peak_flops);
  read(j, "mem_bandwidth", base.mem_bandwidth);
  read(j, "phi_manuf", base.phi_manuf_g_per_gpu_hour);
  return base;
}

ModelProfile model_from_json(const json& j, ModelProfile base) {
  reject_unknown(j, {"name", "num_layers", "d_model", "d_ff", "n_heads", "n_kv_heads",
                     "vocab_size", "param_count", "bytes_per_param", "gated_mlp"},
                 "profiles.models");
  read(j, "name", base.name);
  read(j, "num_layers", base.num_layers);
  read(j, "d_model", base.d_model);
  read(j, "d_ff", base.d_ff);
  read(j, "n_heads", base.n_heads);
  read(j, "n_kv_heads", base.n_kv_heads);
  read(j, "vocab_size", base.vocab_size);
  read(j, "param_count", base.param_count);
  read(j, "bytes_per_param", base.bytes_per_param);
  read(j, "gated_mlp", base.gated_mlp);
  return base;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

GridPolicy parse_policy(std::string_view name) {
  if (name == "passive") return GridPolicy::Passive;
  if (name == "carbon-threshold") return GridPolicy::CarbonThreshold;
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected passive or carbon-threshold)");
}

Interpolation parse_interpolation(std::string_view name) {
  if (name == "nearest") return Interpolation::Nearest;
  if (name == "linear") return Interpolation::Linear;
  if (name == "cubic") return Interpolation::Cubic;
  throw ConfigError("unknown interpolation '" + std::string(name) +
                    "' (expected nearest, linear or cubic)");
}

std::string_view to_string(GridPolicy policy) {
  return policy == GridPolicy::Passive ? "passive" : "carbon-threshold";
}

std::string_view to_string(Interpolation method) {
  switch (method) {
    case Interpolation::Nearest: return "nearest";
    case Interpolation::Linear: return "linear";
    case Interpolation::Cubic: return "cubic";
  }
  return "cubic";
}

void ScenarioConfig::finalize() {
  cluster.gpu = catalog.gpu(gpu_name);
  cluster.model = catalog.model(model_name);
  workload.seed = seed;
  workload.max_tokens = cluster.max_tokens;
  if (!(pue >= 1.0)) throw ConfigError("pue must be >= 1");
  if (!(static_ci >= 0.0)) throw ConfigError("ci must be non-negative");
  if (resolution.count() <= 0) throw ConfigError("resolution_s must be positive");
  workload.validate();
  cluster.validate();
  if (integration) {
    integration->battery.validate();
    if (integration->step.count() <= 0) throw ConfigError("integration.step_s must be positive");
    if (integration->step != resolution) {
      throw ConfigError("integration.step_s must equal inference.resolution_s");
    }
    if (!(integration->ci_low < integration->ci_high)) {
      throw ConfigError("integration: ci_low must be below ci_high");
    }
  }
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.epoch = parse_iso8601("2025-06-02T06:00:00Z");
  c.cluster.stage_overhead_s = 0.0015;
  c.integration = default_integration();
  c.finalize();
  return c;
}

ScenarioConfig integration_scenario() {
  ScenarioConfig c = default_scenario();
  c.model_name = "llama-2-7b";
  c.workload.num_requests = 400'000;
  c.workload.qps = 20.0;
  c.finalize();
  return c;
}

void apply_json(ScenarioConfig& c, const json& doc, const std::filesystem::path& base_dir) {
  reject_unknown(doc, {"inference", "integration", "profiles", "seed", "output_dir", "start"},
                 "config");
  read(doc, "seed", c.seed);
  if (auto it = doc.find("start"); it != doc.end()) {
    try {
      c.epoch = parse_iso8601(it->get<std::string>());
    } catch (const DataError& e) {
      throw ConfigError(std::string("start: ") + e.what());
    }
  }
  if (auto it = doc.find("output_dir"); it != doc.end()) {
    c.output_dir = resolve(it->get<std::string>(), base_dir);
  }

  if (auto it = doc.find("profiles"); it != doc.end()) {
    reject_unknown(*it, {"gpus", "models"}, "profiles");
    for (const auto& g : it->value("gpus", json::array())) {
      const auto name = g.value("name", std::string{});
      GpuProfile base = c.catalog.has_gpu(name) ? c.catalog.gpu(name) : GpuProfile{};
      c.catalog.add_gpu(gpu_from_json(g, base));
    }
    for (const auto& m : it->value("models", json::array())) {
      const auto name = m.value("name", std::string{});
      ModelProfile base = c.catalog.has_model(name) ? c.catalog.model(name) : ModelProfile{};
      c.catalog.add_model(model_from_json(m, base));
    }
  }

  if (auto it = doc.find("inference"); it != doc.end()) {
    const json& j = *it;
    reject_unknown(j, {"device", "model", "tp", "pp", "replicas", "batch_cap", "max_tokens",
                       "qps", "requests", "zipf_theta", "len_min", "len_max", "pd_ratio", "pue",
                       "ci", "roofline_efficiency", "stage_overhead_s", "resolution_s",
                       "idle_fill", "empty_bin_fill"},
                   "inference");
    read(j, "device", c.gpu_name);
    read(j, "model", c.model_name);
    read(j, "tp", c.cluster.tensor_parallel);
    read(j, "pp", c.cluster.pipeline_parallel);
    read(j, "replicas", c.cluster.replicas);
    read(j, "batch_cap", c.cluster.batch_cap);
    read(j, "max_tokens", c.cluster.max_tokens);
    read(j, "qps", c.workload.qps);
    read(j, "requests", c.workload.num_requests);
    read(j, "zipf_theta", c.workload.zipf_theta);
    read(j, "len_min", c.workload.len_min);
    read(j, "len_max", c.workload.len_max);
    read(j, "pd_ratio", c.workload.pd_ratio);
    read(j, "pue", c.pue);
    read(j, "ci", c.static_ci);
    read(j, "roofline_efficiency", c.cluster.roofline_efficiency);
    read(j, "stage_overhead_s", c.cluster.stage_overhead_s);
    std::int64_t res = c.resolution.count();
    read(j, "resolution_s", res);
    c.resolution = std::chrono::seconds{res};
    read(j, "idle_fill", c.idle_fill);
    if (auto f = j.find("empty_bin_fill"); f != j.end()) {
      const auto mode = f->get<std::string>();
      if (mode == "idle") c.empty_bin_fill = EmptyBinFill::IdleFloor;
      else if (mode == "zero") c.empty_bin_fill = EmptyBinFill::Zero;
      else throw ConfigError("inference.empty_bin_fill must be 'idle' or 'zero'");
    }
  }

  if (auto it = doc.find("integration"); it != doc.end()) {
    if (it->is_null()) {
      c.integration.reset();
    } else {
      const json& j = *it;
      reject_unknown(j, {"solar_trace", "ci_trace", "solar_capacity_w", "battery",
                         "step_s", "ci_low", "ci_high", "policy", "solar_interpolation",
                         "ci_interpolation", "extrapolate", "lookahead_guard"},
                     "integration");
      IntegrationConfig g = c.integration.value_or(default_integration());
      if (auto p = j.find("solar_trace"); p != j.end()) {
        g.solar_trace = resolve(p->get<std::string>(), base_dir);
      }
      if (auto p = j.find("ci_trace"); p != j.end()) {
        g.ci_trace = resolve(p->get<std::string>(), base_dir);
      }
      read(j, "solar_capacity_w", g.solar_capacity_w);
      std::int64_t step = g.step.count();
      read(j, "step_s", step);
      g.step = std::chrono::seconds{step};
      read(j, "ci_low", g.ci_low);
      read(j, "ci_high", g.ci_high);
      if (auto p = j.find("policy"); p != j.end()) g.policy = parse_policy(p->get<std::string>());
      if (auto p = j.find("solar_interpolation"); p != j.end()) {
        g.solar_method = parse_interpolation(p->get<std::string>());
      }
      if (auto p = j.find("ci_interpolation"); p != j.end()) {
        g.ci_method = parse_interpolation(p->get<std::string>());
      }
      read(j, "extrapolate", g.extrapolate);
      read(j, "lookahead_guard", g.lookahead_guard);
      if (auto b = j.find("battery"); b != j.end()) {
        reject_unknown(*b, {"capacity_wh", "soc_init", "soc_min", "soc_max", "max_charge_w",
                            "max_discharge_w", "efficiency"},
                       "integration.battery");
        read(*b, "capacity_wh", g.battery.capacity_wh);
        read(*b, "soc_init", g.battery.soc_init);
        read(*b, "soc_min", g.battery.soc_min);
        read(*b, "soc_max", g.battery.soc_max);
        read(*b, "max_charge_w", g.battery.max_charge_w);
        read(*b, "max_discharge_w", g.battery.max_discharge_w);
        read(*b, "efficiency", g.battery.round_trip_efficiency);
      }
      c.integration = g;
    }
  }
  c.finalize();
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  ScenarioConfig c = default_scenario();
  try {
    apply_json(c, doc, path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return c;
}

json to_json(const ScenarioConfig& c) {
  json inference = {
      {"device", c.gpu_name},
      {"model", c.model_name},
      {"tp", c.cluster.tensor_parallel},
      {"pp", c.cluster.pipeline_parallel},
      {"replicas", c.cluster.replicas},
      {"batch_cap", c.cluster.batch_cap},
      {"max_tokens", c.cluster.max_tokens},
      {"qps", c.workload.qps},
      {"requests", c.workload.num_requests},
      {"zipf_theta", c.workload.zipf_theta},
      {"len_min", c.workload.len_min},
      {"len_max", c.workload.len_max},
      {"pd_ratio", c.workload.pd_ratio},
      {"pue", c.pue},
      {"ci", c.static_ci},
      {"roofline_efficiency", c.cluster.roofline_efficiency},
      {"stage_overhead_s", c.cluster.stage_overhead_s},
      {"resolution_s", c.resolution.count()},
      {"idle_fill", c.idle_fill},
      {"empty_bin_fill", c.empty_bin_fill == EmptyBinFill::IdleFloor ? "idle" : "zero"},
  };
  json doc = {{"inference", inference},
              {"seed", c.seed},
              {"output_dir", c.output_dir.string()},
              {"start", format_iso8601(c.epoch)}};
  if (c.integration) {
    const auto& g = *c.integration;
    doc["integration"] = {
        {"solar_trace", g.solar_trace.string()},
        {"ci_trace", g.ci_trace.string()},
        {"solar_capacity_w", g.solar_capacity_w},
        {"step_s", g.step.count()},
        {"ci_low", g.ci_low},
        {"ci_high", g.ci_high},
        {"policy", std::string(to_string(g.policy))},
        {"solar_interpolation", std::string(to_string(g.solar_method))},
        {"ci_interpolation", std::string(to_string(g.ci_method))},
        {"extrapolate", g.extrapolate},
        {"lookahead_guard", g.lookahead_guard},
        {"battery",
         {{"capacity_wh", g.battery.capacity_wh},
          {"soc_init", g.battery.soc_init},
          {"soc_min", g.battery.soc_min},
          {"soc_max", g.battery.soc_max},
          {"max_charge_w", g.battery.max_charge_w},
          {"max_discharge_w", g.battery.max_discharge_w},
          {"efficiency", g.battery.round_trip_efficiency}}},
    };
  }
  return doc;
}

}  // namespace ecoinfer
