#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ecoinfer {

// Calibration constants of one accelerator. Power figures are per GPU.
struct GpuProfile {
  std::string name;
  double p_idle_w = 0.0;
  double p_max_w = 0.0;
  double mfu_sat = 0.45;        // utilization at which power saturates
  double gamma = 0.7;           // sublinear exponent of the power curve
  double peak_flops = 0.0;      // dense FP16/BF16 FLOPs per second
  double mem_bandwidth = 0.0;   // bytes per second
  double phi_manuf_g_per_gpu_hour = 0.0;  // embodied carbon rate

  // Throws ConfigError when any invariant is violated.
  void validate() const;
};

// Decoder-only transformer architecture.
struct ModelProfile {
  std::string name;
  int num_layers = 0;
  int d_model = 0;
  int d_ff = 0;
  int n_heads = 0;
  int n_kv_heads = 0;
  int vocab_size = 0;
  std::int64_t param_count = 0;
  double bytes_per_param = 2.0;
  // Gated (SwiGLU, three matrices) vs. plain two-matrix MLP.
  bool gated_mlp = true;

  void validate() const;

  int head_dim() const { return d_model / n_heads; }

  // Parameter count rebuilt from the architecture: untied input embedding
  // and output head plus per-layer attention and MLP weight matrices.
  double reconstructed_param_count() const;

  // K and V bytes stored per token per layer.
  double kv_bytes_per_token_per_layer() const;

  double weight_bytes() const {
    return static_cast<double>(param_count) * bytes_per_param;
  }
};

std::vector<std::string> builtin_gpu_names();
std::vector<std::string> builtin_model_names();

// Throws ConfigError naming the available profiles when `name` is unknown.
GpuProfile builtin_gpu(std::string_view name);
ModelProfile builtin_model(std::string_view name);

// Builtin tables plus user overrides loaded from configuration.
class ProfileCatalog {
 public:
  ProfileCatalog();

  void add_gpu(GpuProfile gpu);
  void add_model(ModelProfile model);

  const GpuProfile& gpu(std::string_view name) const;
  const ModelProfile& model(std::string_view name) const;

  bool has_gpu(std::string_view name) const;
  bool has_model(std::string_view name) const;

 private:
  std::map<std::string, GpuProfile, std::less<>> gpus_;
  std::map<std::string, ModelProfile, std::less<>> models_;
};

}  // namespace ecoinfer
