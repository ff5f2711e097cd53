#include "ecoinfer/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"

namespace ecoinfer {

namespace {

constexpr const char* kTraceHeader = "request_id,arrival_time_s,prefill_tokens,decode_tokens";

// 53 random bits mapped to [0, 1). std::mt19937_64's output sequence is fixed
// by the standard, so traces are identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void WorkloadConfig::validate() const {
  if (num_requests < 1) throw ConfigError("workload: num_requests must be at least 1");
  if (!(qps > 0.0) || !std::isfinite(qps)) throw ConfigError("workload: qps must be positive");
  if (!(zipf_theta >= 0.0)) throw ConfigError("workload: zipf_theta must be non-negative");
  if (len_min < 1 || len_min > len_max) {
    throw ConfigError("workload: require 1 <= len_min <= len_max");
  }
  if (!(pd_ratio > 0.0) || !std::isfinite(pd_ratio)) {
    throw ConfigError("workload: pd_ratio must be positive");
  }
  if (max_tokens < 2) throw ConfigError("workload: max_tokens must be at least 2");
  if (len_max > max_tokens) {
    throw ConfigError("workload: len_max (" + std::to_string(len_max) +
                      ") exceeds max_tokens (" + std::to_string(max_tokens) + ")");
  }
}

ZipfLengthSampler::ZipfLengthSampler(int len_min, int len_max, double theta)
    : len_min_(len_min), len_max_(len_max) {
  if (len_min < 1 || len_min > len_max) {
    throw ConfigError("zipf: require 1 <= len_min <= len_max");
  }
  cdf_.resize(static_cast<std::size_t>(len_max - len_min) + 1);
  double total = 0.0;
  for (std::size_t rank = 0; rank < cdf_.size(); ++rank) {
    total += std::pow(static_cast<double>(rank + 1), -theta);
    cdf_[rank] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

int ZipfLengthSampler::operator()(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return len_min_ + static_cast<int>(it - cdf_.begin());
}

double ZipfLengthSampler::pmf(int length) const {
  if (length < len_min_ || length > len_max_) return 0.0;
  auto rank = static_cast<std::size_t>(length - len_min_);
  return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

std::pair<int, int> split_length(int length, double pd_ratio) {
  // A single-token request still needs one prefill and one decode token.
  if (length < 2) return {1, 1};
  auto prefill = static_cast<int>(std::lround(length * pd_ratio / (pd_ratio + 1.0)));
  prefill = std::clamp(prefill, 1, length - 1);
  return {prefill, length - prefill};
}

std::vector<Request> generate(const WorkloadConfig& config) {
  config.validate();
  ZipfLengthSampler lengths(config.len_min, config.len_max, config.zipf_theta);
  // Separate streams so that changing qps leaves lengths untouched.
  std::mt19937_64 arrival_rng(config.seed);
  std::mt19937_64 length_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  std::vector<Request> requests;
  requests.reserve(static_cast<std::size_t>(config.num_requests));
  double clock = 0.0;
  for (std::int64_t id = 0; id < config.num_requests; ++id) {
    clock += -std::log1p(-unit_uniform(arrival_rng)) / config.qps;
    const int length = lengths(unit_uniform(length_rng));
    auto [prefill, decode] = split_length(length, config.pd_ratio);
    requests.push_back({id, clock, prefill, decode});
  }
  return requests;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const Request> requests) {
  auto out = detail::open_for_write(path);
  out << kTraceHeader << '\n';
  for (const auto& r : requests) {
    out << r.id << ',' << detail::exact(r.arrival_time_s) << ',' << r.prefill_tokens << ','
        << r.decode_tokens << '\n';
  }
}

std::vector<Request> read_trace_csv(const std::filesystem::path& path) {
  detail::CsvReader reader(path);
  reader.expect_header(kTraceHeader);
  std::vector<Request> requests;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail("expected 4 columns, found " + std::to_string(f.size()));
    Request r;
    r.id = reader.to_int(f[0], "request_id");
    r.arrival_time_s = reader.to_double(f[1], "arrival_time_s");
    r.prefill_tokens = static_cast<int>(reader.to_int(f[2], "prefill_tokens"));
    r.decode_tokens = static_cast<int>(reader.to_int(f[3], "decode_tokens"));
    if (r.prefill_tokens < 1 || r.decode_tokens < 1) {
      reader.fail("token counts must be at least 1");
    }
    if (!requests.empty() && r.arrival_time_s < requests.back().arrival_time_s) {
      reader.fail("arrival times must be nondecreasing");
    }
    requests.push_back(r);
  }
  return requests;
}

}  // namespace ecoinfer
