// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/io.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace molal {
namespace {

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw IoError("line " + std::to_string(lineno) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::ifstream open_in(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path &path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

CsvTable read_csv(std::istream &in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim_right(line);
    if (body.empty())
      continue;
    auto fields = split_csv_line(body, lineno);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back({lineno, std::move(fields)});
    }
  }
  if (!have_header)
    throw IoError("CSV input has no header line");
  return table;
}

CsvTable read_csv(const std::filesystem::path &path) {
  auto in = open_in(path);
  try {
    return read_csv(in);
  } catch (const IoError &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  if (s.empty())
    return std::nullopt;
  const std::string buf(s);
  char *end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size())
    return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(value);
  std::string out = "\"";
  for (char c: value) {
    if (c == '"')
      out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream &out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0)
      out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> read_lines(const std::filesystem::path &path, bool keep_blank) {
  auto in = open_in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view body = trim_right(line);
    if (body.empty() && !keep_blank)
      continue;
    lines.emplace_back(body);
  }
  return lines;
}

void write_lines(const std::filesystem::path &path, std::span<const std::string> lines) {
  auto out = open_out(path);
  for (const std::string &l: lines)
    out << l << '\n';
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path &path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path &path, std::string_view content) {
  auto out = open_out(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace molal
