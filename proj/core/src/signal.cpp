#include "ecoinfer/signal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <cstdio>
#include <numeric>

#include "csv_util.hpp"
#include "ecoinfer/error.hpp"

namespace ecoinfer {

namespace chr = std::chrono;

namespace {

constexpr const char* kLoadHeader = "timestamp,power_watts";
constexpr const char* kEnvHeader = "timestamp,value";

// Natural cubic spline through (x, y), x strictly increasing, n >= 3.
class NaturalSpline {
 public:
  NaturalSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
    const std::size_t n = x_.size();
    // Thomas algorithm on the interior second derivatives.
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
      if (i > 1) {
        const double w = h0 / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  double operator()(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = x_[i + 1] - x;
    const double b = x - x_[i];
    return m_[i] * a * a * a / (6.0 * h) + m_[i + 1] * b * b * b / (6.0 * h) +
           (y_[i] / h - m_[i] * h / 6.0) * a + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

double seconds_since(UtcSeconds t, UtcSeconds origin) {
  return static_cast<double>((t - origin).count());
}

std::int64_t floor_div(double t, double res) { return static_cast<std::int64_t>(std::floor(t / res)); }
std::int64_t ceil_div(double t, double res) { return static_cast<std::int64_t>(std::ceil(t / res)); }

// Adds `weight * overlap` of [lo, hi) to each bin it touches; bins are indexed
// relative to `first_bin`.
void spread(double lo, double hi, double weight, double res, std::int64_t first_bin,
            std::vector<double>& acc) {
  if (!(hi > lo)) return;
  for (std::int64_t b = floor_div(lo, res); b * res < hi; ++b) {
    const double overlap = std::min(hi, (b + 1) * res) - std::max(lo, b * res);
    if (overlap > 0.0) acc[static_cast<std::size_t>(b - first_bin)] += weight * overlap;
  }
}

}  // namespace

std::string format_iso8601(UtcSeconds t) {
  const auto day = chr::floor<chr::days>(t);
  const chr::year_month_day ymd{day};
  const chr::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

UtcSeconds parse_iso8601(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  const std::string str(text);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &s,
                  &consumed) != 7 ||
      (sep != 'T' && sep != ' ')) {
    throw DataError("invalid ISO-8601 timestamp '" + str + "'");
  }
  std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
    throw DataError("timestamp '" + str + "' is not UTC");
  }
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw DataError("invalid calendar time '" + str + "'");
  }
  return chr::sys_days{ymd} + chr::hours{h} + chr::minutes{mi} + chr::seconds{s};
}

PowerSeries bin_power(std::span<const PowerSample> samples, const BinOptions& options) {
  if (samples.empty()) throw DataError("bin_power: no power samples");
  if (options.resolution.count() <= 0) throw ConfigError("bin_power: resolution must be positive");
  const double res = static_cast<double>(options.resolution.count());

  double lo = samples.front().start_time_s;
  double hi = samples.front().end_time_s();
  for (const auto& s : samples) {
    if (!(s.duration_s >= 0.0) || !(s.watts >= 0.0)) {
      throw DataError("bin_power: samples need non-negative duration and watts");
    }
    lo = std::min(lo, s.start_time_s);
    hi = std::max(hi, s.end_time_s());
  }
  const std::int64_t first = floor_div(lo, res);
  const std::int64_t last = std::max(ceil_div(hi, res), first + 1);
  const auto bins = static_cast<std::size_t>(last - first);

  std::vector<double> energy(bins, 0.0);
  for (const auto& s : samples) {
    spread(s.start_time_s, s.end_time_s(), s.watts, res, first, energy);
  }

  // Covered time per bin = measure of the union of sample intervals.
  std::vector<std::pair<double, double>> spans;
  spans.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.duration_s > 0.0) spans.emplace_back(s.start_time_s, s.end_time_s());
  }
  std::sort(spans.begin(), spans.end());
  std::vector<double> covered(bins, 0.0);
  for (std::size_t i = 0; i < spans.size();) {
    double a = spans[i].first;
    double b = spans[i].second;
    for (++i; i < spans.size() && spans[i].first <= b; ++i) b = std::max(b, spans[i].second);
    spread(a, b, 1.0, res, first, covered);
  }

  const double fill = options.fill == EmptyBinFill::IdleFloor ? options.idle_floor_w : 0.0;
  PowerSeries series;
  series.resolution = options.resolution;
  series.start = options.epoch + chr::seconds{first * options.resolution.count()};
  series.values.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    series.values[b] = covered[b] > 0.0 ? energy[b] / covered[b] : fill;
  }
  return series;
}

void EnvTrace::validate() const {
  if (timestamps.size() != values.size()) throw DataError("env trace: column length mismatch");
  if (timestamps.empty()) throw DataError("env trace: no samples");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw DataError("env trace: negative or non-finite value at row " + std::to_string(i + 1));
    }
    if (i > 0 && timestamps[i] <= timestamps[i - 1]) {
      throw DataError("env trace: timestamps must be strictly increasing (row " +
                      std::to_string(i + 1) + ")");
    }
  }
}

EnvTrace resample_env(const EnvTrace& trace, chr::seconds resolution, UtcSeconds start,
                      UtcSeconds end, const ResampleOptions& options) {
  trace.validate();
  if (resolution.count() <= 0) throw ConfigError("resample: resolution must be positive");
  if (end <= start) throw ConfigError("resample: empty window");

  const UtcSeconds origin = trace.timestamps.front();
  const UtcSeconds last_point = start + ((end - start - chr::seconds{1}) / resolution) * resolution;
  if (!options.extrapolate && (start < origin || last_point > trace.timestamps.back())) {
    throw CoverageError("trace covers " + format_iso8601(origin) + " .. " +
                        format_iso8601(trace.timestamps.back()) + " but window needs " +
                        format_iso8601(start) + " .. " + format_iso8601(last_point));
  }

  std::vector<double> x(trace.timestamps.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = seconds_since(trace.timestamps[i], origin);
  const auto& y = trace.values;

  Interpolation method = options.method;
  if (x.size() < 3 && method == Interpolation::Cubic) method = Interpolation::Linear;
  if (x.size() < 2) method = Interpolation::Nearest;
  std::unique_ptr<NaturalSpline> spline;
  if (method == Interpolation::Cubic) spline = std::make_unique<NaturalSpline>(x, y);

  auto evaluate = [&](double t) -> double {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::lower_bound(x.begin(), x.end(), t);
    const auto hi = static_cast<std::size_t>(it - x.begin());
    if (x[hi] == t) return y[hi];  // knots are reproduced exactly
    const std::size_t lo = hi - 1;
    switch (method) {
      case Interpolation::Nearest:
        return (t - x[lo] <= x[hi] - t) ? y[lo] : y[hi];
      case Interpolation::Linear:
        return y[lo] + (y[hi] - y[lo]) * (t - x[lo]) / (x[hi] - x[lo]);
      case Interpolation::Cubic:
        return (*spline)(t);
    }
    return 0.0;
  };

  EnvTrace out;
  out.kind = trace.kind;
  for (UtcSeconds t = start; t < end; t += resolution) {
    out.timestamps.push_back(t);
    out.values.push_back(std::max(0.0, evaluate(seconds_since(t, origin))));
  }
  return out;
}

void export_load_profile(const PowerSeries& series, const std::filesystem::path& path) {
  if (series.values.empty()) throw DataError("load profile has no bins; refusing to write '" +
                                             path.string() + "'");
  auto out = detail::open_for_write(path);
  out << kLoadHeader << '\n';
  for (std::size_t b = 0; b < series.values.size(); ++b) {
    out << format_iso8601(series.time_at(b)) << ',' << detail::sig_digits(series.values[b], 6)
        << '\n';
  }
}

PowerSeries import_load_profile(const std::filesystem::path& path, chr::seconds fallback_resolution) {
  detail::CsvReader reader(path);
  reader.expect_header(kLoadHeader);
  std::vector<UtcSeconds> times;
  PowerSeries series;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail("expected 2 columns, found " + std::to_string(f.size()));
    UtcSeconds t;
    try {
      t = parse_iso8601(f[0]);
    } catch (const DataError& e) {
      reader.fail(e.what());
    }
    const double w = reader.to_double(f[1], "power_watts");
    if (!(w >= 0.0)) reader.fail("power_watts must be non-negative");
    if (times.size() >= 2 && t - times.back() != times[1] - times[0]) {
      reader.fail("bins are not uniformly spaced");
    }
    if (!times.empty() && t <= times.back()) reader.fail("timestamps must increase");
    times.push_back(t);
    series.values.push_back(w);
  }
  if (times.empty()) throw DataError(path.string() + ": load profile has no bins");
  series.start = times.front();
  series.resolution = times.size() >= 2 ? times[1] - times[0] : fallback_resolution;
  return series;
}

PowerSeries quantize_to_profile_precision(PowerSeries series) {
  for (auto& v : series.values) v = std::strtod(detail::sig_digits(v, 6).c_str(), nullptr);
  return series;
}

void write_env_trace(const EnvTrace& trace, const std::filesystem::path& path) {
  trace.validate();
  auto out = detail::open_for_write(path);
  out << kEnvHeader << '\n';
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    out << format_iso8601(trace.timestamps[i]) << ',' << detail::exact(trace.values[i]) << '\n';
  }
}

EnvTrace read_env_trace(const std::filesystem::path& path, EnvKind kind) {
  detail::CsvReader reader(path);
  reader.expect_header(kEnvHeader);
  EnvTrace trace;
  trace.kind = kind;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail("expected 2 columns, found " + std::to_string(f.size()));
    try {
      trace.timestamps.push_back(parse_iso8601(f[0]));
    } catch (const DataError& e) {
      reader.fail(e.what());
    }
    const double v = reader.to_double(f[1], "value");
    if (!(v >= 0.0)) reader.fail("value must be non-negative");
    if (trace.timestamps.size() >= 2 &&
        trace.timestamps.back() <= trace.timestamps[trace.timestamps.size() - 2]) {
      reader.fail("timestamps must be strictly increasing");
    }
    trace.values.push_back(v);
  }
  if (trace.values.empty()) throw DataError(path.string() + ": trace has no samples");
  return trace;
}

}  // namespace ecoinfer
