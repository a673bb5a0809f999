#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

/// Plain comma-separated tables. Every file starts with one comment line
/// naming its schema and version ("# schema=<name>/<version>"), then a header
/// row, then one line per record. Numbers use the shortest decimal form that
/// parses back to the same double; absent values are written as "nan".
namespace mec::csv {

inline constexpr int kSchemaVersion = 1;

struct Table {
  std::string schema;  // e.g. "metrics"
  int version = kSchemaVersion;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range if missing.
  std::size_t column(std::string_view name) const;
};

std::string format_double(double v);
/// Inverse of format_double. Throws std::invalid_argument on malformed input.
double parse_double(std::string_view s);

/// Throws std::runtime_error naming the path when the file cannot be written.
void write(const Table& t, const std::filesystem::path& path);
/// Throws std::runtime_error on I/O failure, a missing or malformed schema
/// line, or rows whose width differs from the header.
Table read(const std::filesystem::path& path);

}  // namespace mec::csv
