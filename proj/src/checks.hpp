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

#include "tables.hpp"

namespace qjt::checks {

/// One verification row: a numeric result checked against its closed-form
/// anchor value at a fixed tolerance.
struct CheckRow {
  std::string check_id;
  std::string anchor;  // which reference formula the check validates
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Runs the built-in oracle checks: every closed-form result the library is
/// expected to reproduce, compared against the reference layer.
std::vector<CheckRow> run_verification();

bool all_passed(const std::vector<CheckRow>& rows);
tables::Table to_table(const std::vector<CheckRow>& rows);

}  // namespace qjt::checks
