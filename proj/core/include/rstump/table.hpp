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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rstump {

// Untyped column-major text table as read from a delimited file.
struct RawTable {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> columns;

  std::size_t row_count() const { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  void add_column(std::string name, std::vector<std::string> values);
};

// Reads comma- or tab-delimited text with a header row. delimiter == '\0'
// picks tab when the header line contains one, comma otherwise. Fields may be
// double-quoted with "" as the escape for a literal quote.
RawTable read_delimited(const std::filesystem::path& path, char delimiter = '\0');
RawTable parse_delimited(std::string_view text, char delimiter = '\0');

void write_delimited(const RawTable& table, const std::filesystem::path& path, char delimiter = ',');

// Empty, NA, NaN, null (any case) count as missing.
bool is_missing_cell(std::string_view cell);

// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string format_double(double value);

}  // namespace rstump
