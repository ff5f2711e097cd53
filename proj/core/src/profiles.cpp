#include "ecoinfer/profiles.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "ecoinfer/error.hpp"

namespace ecoinfer {

namespace {

// Idle/peak power from DGX and full-load benchmark data. Throughput and
// bandwidth are vendor datasheet figures for dense (non-sparse) tensor math:
//   A100 SXM4 80GB: 312 TFLOPS BF16, 2039 GB/s HBM2e
//   H100 SXM5:      989.4 TFLOPS BF16, 3350 GB/s HBM3
//   A40 PCIe:       149.7 TFLOPS BF16, 696 GB/s GDDR6
const std::array<GpuProfile, 3> kGpus{{
    {"a100-sxm4-80g", 100.0, 400.0, 0.45, 0.7, 312e12, 2039e9, 0.0},
    {"h100-sxm5", 60.0, 700.0, 0.45, 0.7, 989.4e12, 3350e9, 0.0},
    {"a40-pcie", 30.0, 300.0, 0.45, 0.7, 149.7e12, 696e9, 0.0},
}};

// Architecture constants from the public model cards (config.json).
// qwen-72b is the first-generation release with full multi-head attention;
// phi-2 stands in for the 2.7B class and uses a plain GELU MLP.
const std::array<ModelProfile, 6> kModels{{
    {"phi-2", 32, 2560, 10240, 32, 32, 51200, 2'779'683'840, 2.0, false},
    {"llama-2-7b", 32, 4096, 11008, 32, 32, 32000, 6'738'415'616, 2.0, true},
    {"llama-3-8b", 32, 4096, 14336, 32, 8, 128256, 8'030'261'248, 2.0, true},
    {"codellama-34b", 48, 8192, 22016, 64, 8, 32000, 33'743'970'304, 2.0, true},
    {"llama-3-70b", 80, 8192, 28672, 64, 8, 128256, 70'553'706'496, 2.0, true},
    {"qwen-72b", 80, 8192, 24576, 64, 64, 152064, 72'287'920'128, 2.0, true},
}};

template <typename Range>
std::string join_names(const Range& items) {
  std::ostringstream out;
  bool first = true;
  for (const auto& item : items) {
    if (!first) out << ", ";
    out << item.name;
    first = false;
  }
  return out.str();
}

template <typename Map>
std::string join_keys(const Map& map) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [key, value] : map) {
    if (!first) out << ", ";
    out << key;
    first = false;
  }
  return out.str();
}

}  // namespace

void GpuProfile::validate() const {
  auto fail = [&](const std::string& what) {
    throw ConfigError("gpu profile '" + name + "': " + what);
  };
  if (!(p_idle_w > 0.0)) fail("p_idle must be positive");
  if (!(p_idle_w < p_max_w)) fail("p_idle must be below p_max_inst");
  if (!(mfu_sat > 0.0 && mfu_sat <= 1.0)) fail("mfu_sat must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  if (!(peak_flops > 0.0)) fail("peak_flops must be positive");
  if (!(mem_bandwidth > 0.0)) fail("mem_bandwidth must be positive");
  if (!(phi_manuf_g_per_gpu_hour >= 0.0)) fail("phi_manuf must be non-negative");
}

void ModelProfile::validate() const {
  auto fail = [&](const std::string& what) {
    throw ConfigError("model profile '" + name + "': " + what);
  };
  if (num_layers <= 0 || d_model <= 0 || d_ff <= 0 || n_heads <= 0 ||
      n_kv_heads <= 0 || vocab_size <= 0) {
    fail("all architecture counts must be positive");
  }
  if (param_count <= 0) fail("param_count must be positive");
  if (d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (n_heads % n_kv_heads != 0) fail("n_heads must be divisible by n_kv_heads");
  if (!(bytes_per_param > 0.0)) fail("bytes_per_param must be positive");
}

double ModelProfile::reconstructed_param_count() const {
  const double d = d_model;
  const double kv_dim = d * n_kv_heads / n_heads;
  const double attention = 2.0 * d * d + 2.0 * d * kv_dim;  // q, o, k, v
  const double mlp = (gated_mlp ? 3.0 : 2.0) * d * d_ff;
  const double embeddings = 2.0 * static_cast<double>(vocab_size) * d;
  return num_layers * (attention + mlp) + embeddings;
}

double ModelProfile::kv_bytes_per_token_per_layer() const {
  return 2.0 * head_dim() * n_kv_heads * bytes_per_param;
}

std::vector<std::string> builtin_gpu_names() {
  std::vector<std::string> names;
  for (const auto& g : kGpus) names.push_back(g.name);
  return names;
}

std::vector<std::string> builtin_model_names() {
  std::vector<std::string> names;
  for (const auto& m : kModels) names.push_back(m.name);
  return names;
}

GpuProfile builtin_gpu(std::string_view name) {
  for (const auto& g : kGpus) {
    if (g.name == name) return g;
  }
  throw ConfigError("unknown gpu profile '" + std::string(name) +
                    "' (available: " + join_names(kGpus) + ")");
}

ModelProfile builtin_model(std::string_view name) {
  for (const auto& m : kModels) {
    if (m.name == name) return m;
  }
  throw ConfigError("unknown model profile '" + std::string(name) +
                    "' (available: " + join_names(kModels) + ")");
}

ProfileCatalog::ProfileCatalog() {
  for (const auto& g : kGpus) gpus_.emplace(g.name, g);
  for (const auto& m : kModels) models_.emplace(m.name, m);
}

void ProfileCatalog::add_gpu(GpuProfile gpu) {
  gpu.validate();
  auto key = gpu.name;
  gpus_.insert_or_assign(std::move(key), std::move(gpu));
}

void ProfileCatalog::add_model(ModelProfile model) {
  model.validate();
  auto key = model.name;
  models_.insert_or_assign(std::move(key), std::move(model));
}

const GpuProfile& ProfileCatalog::gpu(std::string_view name) const {
  auto it = gpus_.find(name);
  if (it == gpus_.end()) {
    throw ConfigError("unknown gpu profile '" + std::string(name) +
                      "' (available: " + join_keys(gpus_) + ")");
  }
  return it->second;
}

const ModelProfile& ProfileCatalog::model(std::string_view name) const {
  auto it = models_.find(name);
  if (it == models_.end()) {
    throw ConfigError("unknown model profile '" + std::string(name) +
                      "' (available: " + join_keys(models_) + ")");
  }
  return it->second;
}

bool ProfileCatalog::has_gpu(std::string_view name) const {
  return gpus_.find(name) != gpus_.end();
}

bool ProfileCatalog::has_model(std::string_view name) const {
  return models_.find(name) != models_.end();
}

}  // namespace ecoinfer
