// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_IO_H_
#define MOLAL_IO_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molal/error.h"

namespace molal {

class IoError : public Error {
 public:
  using Error::Error;
};

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

// Comma separated, optional double-quoted fields ("" escapes a quote),
// LF or CRLF line endings. Blank lines are skipped. The first non-blank
// line is the header.
CsvTable read_csv(std::istream &in);
CsvTable read_csv(const std::filesystem::path &path);

std::string csv_field(std::string_view value);

// Whole-field number parsing with surrounding spaces ignored. Subnormal
// values are accepted; anything else left over is an error.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);
void write_csv_row(std::ostream &out, std::span<const std::string> fields);

// One entry per line with trailing whitespace stripped; blank lines kept
// only when keep_blank is set.
std::vector<std::string> read_lines(const std::filesystem::path &path, bool keep_blank = false);
void write_lines(const std::filesystem::path &path, std::span<const std::string> lines);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view content);

}  // namespace molal

#endif  // MOLAL_IO_H_
