#pragma once

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memant::io {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Builds CSV text in memory; numbers use format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& row(std::span<const double> values);
  CsvWriter& row(std::initializer_list<std::string_view> cells);

  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes to a sibling temporary file and renames it over `path`. Throws
/// IoError on failure; no partial file is left behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> contents);

std::vector<unsigned char> read_file(const std::filesystem::path& path);

}  // namespace memant::io
