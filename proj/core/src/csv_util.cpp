#include "csv_util.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

#include "ecoinfer/error.hpp"

namespace ecoinfer::detail {

CsvReader::CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw DataError("cannot open '" + path.string() + "' for reading");
}

void CsvReader::fail(const std::string& what) const {
  throw DataError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
}

void CsvReader::expect_header(std::string_view header) {
  if (!std::getline(in_, line_)) {
    line_no_ = 1;
    fail("file is empty, expected header '" + std::string(header) + "'");
  }
  ++line_no_;
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  if (line_ != header) {
    fail("unexpected header '" + line_ + "', expected '" + std::string(header) + "'");
  }
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty()) continue;
    fields.clear();
    std::string_view rest(line_);
    for (;;) {
      auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return true;
  }
  return false;
}

double CsvReader::to_double(std::string_view field, std::string_view column) const {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    fail("column '" + std::string(column) + "': cannot parse '" + std::string(field) +
         "' as a number");
  }
  return value;
}

std::int64_t CsvReader::to_int(std::string_view field, std::string_view column) const {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    fail("column '" + std::string(column) + "': cannot parse '" + std::string(field) +
         "' as an integer");
  }
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string exact(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string sig_digits(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

}  // namespace ecoinfer::detail
