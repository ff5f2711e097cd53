#pragma once

// Minimal CSV reading/writing shared by the file-format code in core.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ecoinfer::detail {

// Line-oriented reader that tracks line numbers for error messages.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path);

  // Checks the first line against the expected header; throws DataError.
  void expect_header(std::string_view header);

  // Reads the next non-empty row; returns false at end of file.
  bool next(std::vector<std::string_view>& fields);

  [[noreturn]] void fail(const std::string& what) const;

  double to_double(std::string_view field, std::string_view column) const;
  std::int64_t to_int(std::string_view field, std::string_view column) const;

  std::size_t line_number() const { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::ofstream open_for_write(const std::filesystem::path& path);

// Shortest round-trippable decimal representation of a double.
std::string exact(double value);

// printf-style "%.{digits}g".
std::string sig_digits(double value, int digits);

}  // namespace ecoinfer::detail
