// Copyright 2026 The rstump Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rstump/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rstump/error.hpp"

namespace rstump {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one logical record starting at pos; advances pos past the record
// terminator. Quoted fields may span lines.
std::vector<std::string> next_record(std::string_view text, std::size_t& pos, char delim,
                                     std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
      ++pos;
      continue;
    }
    if (c == delim) {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
      ++pos;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(std::move(field));
      return fields;
    }
    field.push_back(c);
    ++pos;
  }
  if (quoted) {
    throw DataError("unterminated quoted field starting near line " + std::to_string(line_no));
  }
  fields.push_back(std::move(field));
  return fields;
}

bool needs_quoting(std::string_view s, char delim) {
  return s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos;
}

}  // namespace

std::optional<std::size_t> RawTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (headers[i] == name) return i;
  }
  return std::nullopt;
}

void RawTable::add_column(std::string name, std::vector<std::string> values) {
  headers.push_back(std::move(name));
  columns.push_back(std::move(values));
}

RawTable parse_delimited(std::string_view text, char delimiter) {
  // Strip a UTF-8 byte-order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  if (text.empty()) throw DataError("input is empty (expected a header row)");

  if (delimiter == '\0') {
    const auto eol = text.find('\n');
    const auto header = text.substr(0, eol);
    delimiter = header.find('\t') != std::string_view::npos ? '\t' : ',';
  }

  std::size_t pos = 0;
  std::size_t line = 1;
  RawTable table;
  table.headers = next_record(text, pos, delimiter, line);
  for (auto& h : table.headers) {
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.back()))) h.pop_back();
  }
  table.columns.resize(table.headers.size());

  while (pos < text.size()) {
    ++line;
    auto fields = next_record(text, pos, delimiter, line);
    if (fields.size() == 1 && fields[0].empty() && table.headers.size() > 1) continue;  // blank line
    if (fields.size() != table.headers.size()) {
      throw DataError("line " + std::to_string(line) + ": expected " +
                      std::to_string(table.headers.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) table.columns[c].push_back(std::move(fields[c]));
  }
  return table;
}

RawTable read_delimited(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_delimited(buf.str(), delimiter);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_delimited(const RawTable& table, const std::filesystem::path& path, char delimiter) {
  std::ostringstream out;
  auto emit = [&](std::string_view cell) {
    if (needs_quoting(cell, delimiter)) {
      out << '"';
      for (char c : cell) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << cell;
    }
  };
  for (std::size_t c = 0; c < table.headers.size(); ++c) {
    if (c) out << delimiter;
    emit(table.headers[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << delimiter;
      emit(table.columns[c][r]);
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

bool is_missing_cell(std::string_view cell) {
  while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
  while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
  if (cell.empty()) return true;
  const auto l = lower(cell);
  return l == "na" || l == "nan" || l == "null";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string format_double(double value) {
  // Shortest representation that round-trips.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace rstump
