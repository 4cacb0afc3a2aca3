#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dms::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. A UTF-8 BOM and CRLF line endings are accepted. Blank lines are
/// skipped. Throws Error(Format) on an unterminated quote.
[[nodiscard]] Table parse(std::string_view text);

/// Reads and parses a file; throws Error(Io) if it cannot be read.
[[nodiscard]] Table read_file(const std::filesystem::path& path);

/// Throws Error(Format) unless `table.header` equals `expected` exactly.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    std::string_view what);

[[nodiscard]] std::string escape(std::string_view field);

}  // namespace dms::csv
