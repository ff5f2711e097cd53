#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace ecoinfer {

struct Request {
  std::int64_t id = 0;
  double arrival_time_s = 0.0;
  int prefill_tokens = 1;
  int decode_tokens = 1;

  int total_tokens() const { return prefill_tokens + decode_tokens; }

  friend bool operator==(const Request&, const Request&) = default;
};

struct WorkloadConfig {
  std::int64_t num_requests = 1024;
  double qps = 6.45;          // Poisson arrival rate
  double zipf_theta = 0.6;
  int len_min = 1024;         // total tokens per request, inclusive range
  int len_max = 4096;
  double pd_ratio = 20.0;     // prefill:decode tokens
  int max_tokens = 4096;
  std::uint64_t seed = 42;

  void validate() const;
};

// Discrete power law over lengths len_min..len_max with P(L) proportional to
// (L - len_min + 1)^-theta, sampled by inverse CDF.
class ZipfLengthSampler {
 public:
  ZipfLengthSampler(int len_min, int len_max, double theta);

  // Maps u in [0, 1) to a length.
  int operator()(double u) const;

  double pmf(int length) const;
  int len_min() const { return len_min_; }
  int len_max() const { return len_max_; }

 private:
  int len_min_;
  int len_max_;
  std::vector<double> cdf_;
};

// Deterministic prefill/decode split of a request of `length` total tokens.
std::pair<int, int> split_length(int length, double pd_ratio);

// Synthetic trace: exponential inter-arrival gaps with mean 1/qps, Zipf total
// lengths, per-request P:D split. Identical output for identical config.
std::vector<Request> generate(const WorkloadConfig& config);

// CSV header: request_id,arrival_time_s,prefill_tokens,decode_tokens
void write_trace_csv(const std::filesystem::path& path, std::span<const Request> requests);
std::vector<Request> read_trace_csv(const std::filesystem::path& path);

}  // namespace ecoinfer
