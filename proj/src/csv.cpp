#include "memant/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "memant/errors.hpp"

namespace memant::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw ArgumentError("csv: header must have at least one column");
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) text_ += ',';
    text_ += header[k];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) throw ArgumentError("csv: row width does not match header");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) text_ += ',';
    text_ += format_double(values[k]);
  }
  text_ += '\n';
  ++rows_;
  return *this;
}

CsvWriter& CsvWriter::row(std::initializer_list<std::string_view> cells) {
  if (cells.size() != columns_) throw ArgumentError("csv: row width does not match header");
  bool first = true;
  for (auto c : cells) {
    if (!first) text_ += ',';
    first = false;
    text_ += c;
  }
  text_ += '\n';
  ++rows_;
  return *this;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  write_file_atomic(path, std::span<const unsigned char>(
                              reinterpret_cast<const unsigned char*>(contents.data()), contents.size()));
}

void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(contents.data()),
              static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace memant::io
