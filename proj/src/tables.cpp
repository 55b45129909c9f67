// Copyright 2026 qjt developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tables.hpp"

#include <cstdio>
#include <fstream>

#include "common.hpp"

namespace qjt::tables {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw ArgumentError("Table: row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_integer(long long value) { return std::to_string(value); }

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out += ',';
    out += table.columns[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw IoError("write_csv: cannot open '" + path + "'");
  const std::string text = to_csv(table);
  stream.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!stream) throw IoError("write_csv: write failed for '" + path + "'");
}

}  // namespace qjt::tables
