#pragma once

// Bridge from variable-duration power samples to fixed-resolution series,
// plus environment trace resampling and the on-disk CSV formats.
//
// Load profile CSV (one row per bin, timestamps label the bin START):
//   timestamp,power_watts
//   2025-06-01T00:00:00Z,312.457
// Values carry 6 significant digits.
//
// Environment trace CSV (the kind is supplied by the caller):
//   timestamp,value

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoinfer/power.hpp"

namespace ecoinfer {

using UtcSeconds = std::chrono::sys_seconds;

std::string format_iso8601(UtcSeconds t);
// Accepts "YYYY-MM-DDTHH:MM:SS" with optional "Z" or "+00:00"; throws DataError.
UtcSeconds parse_iso8601(std::string_view text);

struct PowerSeries {
  UtcSeconds start{};
  std::chrono::seconds resolution{60};
  std::vector<double> values;  // watts, duration-weighted bin means

  UtcSeconds time_at(std::size_t bin) const {
    return start + resolution * static_cast<std::int64_t>(bin);
  }
  UtcSeconds end() const { return time_at(values.size()); }

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;
};

enum class EmptyBinFill { IdleFloor, Zero };

struct BinOptions {
  std::chrono::seconds resolution{60};
  UtcSeconds epoch{};                       // absolute time of simulation second 0
  EmptyBinFill fill = EmptyBinFill::IdleFloor;
  double idle_floor_w = 0.0;                // cluster idle power for empty bins
};

// Duration-weighted binning. Samples are first summed into a cluster-total
// curve (overlapping samples add), then each bin holds
//   sum(P_i * dt_i) / sum(dt_i)
// over the portions of the curve inside the bin. Bins the curve never touches
// get the configured fill. Throws DataError on empty input.
PowerSeries bin_power(std::span<const PowerSample> samples, const BinOptions& options);

enum class EnvKind { CarbonIntensity, SolarIrradiance };
enum class Interpolation { Nearest, Linear, Cubic };

struct EnvTrace {
  EnvKind kind = EnvKind::CarbonIntensity;
  std::vector<UtcSeconds> timestamps;  // strictly increasing
  std::vector<double> values;          // non-negative

  void validate() const;
};

struct ResampleOptions {
  Interpolation method = Interpolation::Cubic;
  // Hold the edge values outside the trace instead of raising CoverageError.
  bool extrapolate = false;
};

// Samples the trace at start, start + resolution, ... (< end). Cubic uses a
// natural spline (zero second derivative at both ends); results are clamped
// at zero.
EnvTrace resample_env(const EnvTrace& trace, std::chrono::seconds resolution, UtcSeconds start,
                      UtcSeconds end, const ResampleOptions& options = {});

void export_load_profile(const PowerSeries& series, const std::filesystem::path& path);
// Resolution is inferred from the timestamps; a single-row file uses
// `fallback_resolution`.
PowerSeries import_load_profile(const std::filesystem::path& path,
                                std::chrono::seconds fallback_resolution = std::chrono::seconds{60});

// Rounds every value to the 6 significant digits the load profile stores.
PowerSeries quantize_to_profile_precision(PowerSeries series);

void write_env_trace(const EnvTrace& trace, const std::filesystem::path& path);
EnvTrace read_env_trace(const std::filesystem::path& path, EnvKind kind);

}  // namespace ecoinfer
