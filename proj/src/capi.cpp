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

#include "qjt/qjt.h"

#include <cstring>
#include <string>

#include "checks.hpp"
#include "runops.hpp"

struct qjt_scenario {
  qjt::scenario::Scenario value;
};

struct qjt_table {
  qjt::tables::Table value;
};

namespace {

thread_local std::string g_last_error;

qjt_status fail(qjt_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
qjt_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const qjt::ValidationError& e) {
    return fail(QJT_ERROR_VALIDATION, e.what());
  } catch (const qjt::ArgumentError& e) {
    return fail(QJT_ERROR_ARGUMENT, e.what());
  } catch (const qjt::ModelError& e) {
    return fail(QJT_ERROR_VALIDATION, e.what());
  } catch (const qjt::IoError& e) {
    return fail(QJT_ERROR_IO, e.what());
  } catch (const qjt::NumericError& e) {
    return fail(QJT_ERROR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(QJT_ERROR_NUMERIC, e.what());
  }
}

qjt_table* wrap(qjt::tables::Table table) {
  return new qjt_table{std::move(table)};
}

bool grid_from(const qjt_grid* grid, qjt::scenario::GridSpec& out) {
  if (!grid) return false;
  out.t0 = grid->t0;
  out.t1 = grid->t1;
  out.steps = static_cast<int>(grid->steps);
  out.present = true;
  return true;
}

}  // namespace

extern "C" {

const char* qjt_version(void) { return "0.1.0"; }

const char* qjt_last_error(void) { return g_last_error.c_str(); }

qjt_status qjt_scenario_load_file(const char* path, qjt_scenario** out) {
  if (!path || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new qjt_scenario{qjt::scenario::load(path)};
    return QJT_OK;
  });
}

qjt_status qjt_scenario_load_string(const char* json_text, qjt_scenario** out) {
  if (!json_text || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new qjt_scenario{qjt::scenario::parse(json_text)};
    return QJT_OK;
  });
}

char* qjt_scenario_to_json(const qjt_scenario* scenario) {
  if (!scenario) return nullptr;
  try {
    const std::string text = qjt::scenario::serialize(scenario->value);
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

void qjt_scenario_free(qjt_scenario* scenario) { delete scenario; }

void qjt_string_free(char* text) { delete[] text; }

qjt_status qjt_scenario_set_seed(qjt_scenario* scenario, uint64_t seed) {
  if (!scenario) return fail(QJT_ERROR_ARGUMENT, "null scenario");
  scenario->value.seed = seed;
  return QJT_OK;
}

qjt_status qjt_scenario_set_trajectories(qjt_scenario* scenario, uint64_t count) {
  if (!scenario) return fail(QJT_ERROR_ARGUMENT, "null scenario");
  if (count < 1) return fail(QJT_ERROR_ARGUMENT, "trajectories must be >= 1");
  scenario->value.trajectories = count;
  return QJT_OK;
}

int qjt_scenario_wants(const qjt_scenario* scenario, const char* table_name) {
  if (!scenario || !table_name) return 0;
  const auto& outputs = scenario->value.outputs;
  if (outputs.empty()) return 1;
  for (const auto& name : outputs) {
    if (name == table_name) return 1;
  }
  return 0;
}

qjt_status qjt_run_simulate(const qjt_scenario* scenario, int workers,
                            qjt_table** events, qjt_table** states) {
  if (!scenario || !events || !states) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    auto result = qjt::runops::run_simulate(scenario->value, workers);
    *events = wrap(std::move(result.events));
    *states = wrap(std::move(result.states));
    return QJT_OK;
  });
}

qjt_status qjt_run_survival(const qjt_scenario* scenario, const qjt_grid* grid,
                            qjt_table** out, double* mean, double* variance,
                            double* tail) {
  if (!scenario || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    qjt::scenario::GridSpec spec;
    const bool has_grid = grid_from(grid, spec);
    auto [table, summary] =
        qjt::runops::run_survival(scenario->value, has_grid ? &spec : nullptr);
    *out = wrap(std::move(table));
    if (mean) *mean = summary.mean;
    if (variance) *variance = summary.variance;
    if (tail) *tail = summary.tail;
    return QJT_OK;
  });
}

qjt_status qjt_run_counts(const qjt_scenario* scenario, qjt_table** out) {
  if (!scenario || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = wrap(qjt::runops::run_counts(scenario->value));
    return QJT_OK;
  });
}

qjt_status qjt_run_exclusive(const qjt_scenario* scenario, double* density) {
  if (!scenario || !density) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    *density = qjt::runops::run_exclusive(scenario->value);
    return QJT_OK;
  });
}

qjt_status qjt_run_revival(const qjt_scenario* scenario, const qjt_grid* grid,
                           qjt_table** out) {
  if (!scenario || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    qjt::scenario::GridSpec spec;
    const bool has_grid = grid_from(grid, spec);
    *out = wrap(qjt::runops::run_revival(scenario->value, has_grid ? &spec : nullptr));
    return QJT_OK;
  });
}

qjt_status qjt_run_walk(const qjt_scenario* scenario, int workers, qjt_table** out) {
  if (!scenario || !out) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = wrap(qjt::runops::run_walk(scenario->value, workers));
    return QJT_OK;
  });
}

qjt_status qjt_run_verify(qjt_table** report) {
  if (!report) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    const auto rows = qjt::checks::run_verification();
    *report = wrap(qjt::checks::to_table(rows));
    if (!qjt::checks::all_passed(rows)) {
      return fail(QJT_ERROR_VERIFY, "verification suite reported failing checks");
    }
    return QJT_OK;
  });
}

int64_t qjt_table_rows(const qjt_table* table) {
  return table ? static_cast<int64_t>(table->value.rows.size()) : 0;
}

int64_t qjt_table_cols(const qjt_table* table) {
  return table ? static_cast<int64_t>(table->value.columns.size()) : 0;
}

const char* qjt_table_name(const qjt_table* table) {
  return table ? table->value.name.c_str() : "";
}

const char* qjt_table_column(const qjt_table* table, int64_t col) {
  if (!table || col < 0 || col >= qjt_table_cols(table)) return nullptr;
  return table->value.columns[static_cast<std::size_t>(col)].c_str();
}

const char* qjt_table_cell(const qjt_table* table, int64_t row, int64_t col) {
  if (!table || row < 0 || row >= qjt_table_rows(table) || col < 0 ||
      col >= qjt_table_cols(table)) {
    return nullptr;
  }
  return table->value.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]
      .c_str();
}

qjt_status qjt_table_write_csv(const qjt_table* table, const char* path) {
  if (!table || !path) return fail(QJT_ERROR_ARGUMENT, "null argument");
  return guarded([&]() {
    qjt::tables::write_csv(table->value, path);
    return QJT_OK;
  });
}

void qjt_table_free(qjt_table* table) { delete table; }

}  // extern "C"
