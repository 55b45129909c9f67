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

#pragma once

#include <string>
#include <vector>

namespace qjt::tables {

/// Row-oriented result table; every value is carried as its final text so
/// that CSV output is byte-deterministic.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// 17-significant-digit float formatting used by every emitter.
std::string format_double(double value);
std::string format_integer(long long value);

std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

}  // namespace qjt::tables
