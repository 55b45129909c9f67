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

// Scenario-driven command line front end. Everything below talks to the
// shared library exclusively through the C API in qjt/qjt.h.

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qjt/qjt.h"

namespace {

struct TableDeleter {
  void operator()(qjt_table* t) const { qjt_table_free(t); }
};
struct ScenarioDeleter {
  void operator()(qjt_scenario* s) const { qjt_scenario_free(s); }
};
using TablePtr = std::unique_ptr<qjt_table, TableDeleter>;
using ScenarioPtr = std::unique_ptr<qjt_scenario, ScenarioDeleter>;

int exit_code(qjt_status status) {
  switch (status) {
    case QJT_OK: return 0;
    case QJT_ERROR_ARGUMENT:
    case QJT_ERROR_VALIDATION:
    case QJT_ERROR_IO: return 2;
    case QJT_ERROR_NUMERIC: return 3;
    case QJT_ERROR_VERIFY: return 4;
  }
  return 3;
}

int report_failure(qjt_status status) {
  std::fprintf(stderr, "error: %s\n", qjt_last_error());
  return exit_code(status);
}

struct Options {
  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int workers = 1;
  std::string grid_text;
};

bool parse_grid(const std::string& text, qjt_grid& grid) {
  double t0 = 0.0, t1 = 0.0;
  long long steps = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lld", &t0, &t1, &steps) != 3 ||
      !(t1 > t0) || steps < 1) {
    return false;
  }
  grid = {t0, t1, steps};
  return true;
}

ScenarioPtr load_scenario(const Options& opt, qjt_status& status) {
  qjt_scenario* raw = nullptr;
  status = qjt_scenario_load_file(opt.scenario_path.c_str(), &raw);
  ScenarioPtr scenario(raw);
  if (status == QJT_OK && opt.has_seed) {
    status = qjt_scenario_set_seed(scenario.get(), opt.seed);
  }
  return scenario;
}

int write_table(const qjt_table* table, const Options& opt, const std::string& file) {
  const std::string path = opt.out_dir + "/" + file;
  const qjt_status status = qjt_table_write_csv(table, path.c_str());
  if (status != QJT_OK) return report_failure(status);
  std::printf("wrote %s (%" PRId64 " rows)\n", path.c_str(), qjt_table_rows(table));
  return 0;
}

void print_table(const qjt_table* table) {
  const int64_t rows = qjt_table_rows(table);
  const int64_t cols = qjt_table_cols(table);
  for (int64_t j = 0; j < cols; ++j) {
    std::printf("%s%s", j ? "," : "", qjt_table_column(table, j));
  }
  std::printf("\n");
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) {
      std::printf("%s%s", j ? "," : "", qjt_table_cell(table, i, j));
    }
    std::printf("\n");
  }
}

int cmd_simulate(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  qjt_table* events = nullptr;
  qjt_table* states = nullptr;
  status = qjt_run_simulate(scenario.get(), opt.workers, &events, &states);
  if (status != QJT_OK) return report_failure(status);
  const TablePtr events_ptr(events), states_ptr(states);
  if (qjt_scenario_wants(scenario.get(), "events")) {
    if (int rc = write_table(events, opt, "events.csv")) return rc;
  }
  if (qjt_scenario_wants(scenario.get(), "states")) {
    if (int rc = write_table(states, opt, "states.csv")) return rc;
  }
  return 0;
}

int cmd_survival(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  qjt_grid grid;
  const bool has_grid = !opt.grid_text.empty() && parse_grid(opt.grid_text, grid);
  if (!opt.grid_text.empty() && !has_grid) {
    std::fprintf(stderr, "error: --grid expects t0:t1:steps\n");
    return 2;
  }
  qjt_table* table = nullptr;
  double mean = 0.0, variance = 0.0, tail = 0.0;
  status = qjt_run_survival(scenario.get(), has_grid ? &grid : nullptr, &table, &mean,
                            &variance, &tail);
  if (status != QJT_OK) return report_failure(status);
  const TablePtr table_ptr(table);
  if (int rc = write_table(table, opt, "waiting.csv")) return rc;
  std::printf("waiting-time mean: %.17g\n", mean);
  std::printf("waiting-time variance: %.17g\n", variance);
  std::printf("waiting-time tail: %.17g\n", tail);
  return 0;
}

int cmd_counts(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  qjt_table* table = nullptr;
  status = qjt_run_counts(scenario.get(), &table);
  if (status != QJT_OK) return report_failure(status);
  const TablePtr table_ptr(table);
  print_table(table);
  return write_table(table, opt, "counts.csv");
}

int cmd_exclusive(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  double density = 0.0;
  status = qjt_run_exclusive(scenario.get(), &density);
  if (status != QJT_OK) return report_failure(status);
  std::printf("%.17g\n", density);
  return 0;
}

int cmd_revival(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  qjt_grid grid;
  const bool has_grid = !opt.grid_text.empty() && parse_grid(opt.grid_text, grid);
  if (!opt.grid_text.empty() && !has_grid) {
    std::fprintf(stderr, "error: --grid expects t0:t1:steps\n");
    return 2;
  }
  qjt_table* table = nullptr;
  status = qjt_run_revival(scenario.get(), has_grid ? &grid : nullptr, &table);
  if (status != QJT_OK) return report_failure(status);
  const TablePtr table_ptr(table);
  return write_table(table, opt, "distances.csv");
}

int cmd_walk(const Options& opt) {
  qjt_status status = QJT_OK;
  const ScenarioPtr scenario = load_scenario(opt, status);
  if (status != QJT_OK) return report_failure(status);
  qjt_table* table = nullptr;
  status = qjt_run_walk(scenario.get(), opt.workers, &table);
  if (status != QJT_OK) return report_failure(status);
  const TablePtr table_ptr(table);
  return write_table(table, opt, "walk.csv");
}

int cmd_verify(const Options& opt) {
  qjt_table* table = nullptr;
  const qjt_status status = qjt_run_verify(&table);
  const TablePtr table_ptr(table);
  if (table) {
    print_table(table);
    const std::string path = opt.out_dir + "/verify_report.csv";
    qjt_table_write_csv(table, path.c_str());
  }
  if (status != QJT_OK) {
    std::fprintf(stderr, "verification failed: %s\n", qjt_last_error());
    return exit_code(status);
  }
  std::printf("all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jump-trajectory simulation toolkit"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario) {
      cmd->add_option("--scenario", opt.scenario_path, "scenario JSON path")
          ->required();
    }
    cmd->add_option("--out", opt.out_dir, "output directory (default .)");
    cmd->add_option("--seed", opt.seed, "override the scenario seed")
        ->each([&](const std::string&) { opt.has_seed = true; });
    cmd->add_option("--workers", opt.workers, "worker threads (wall time only)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid", opt.grid_text, "time grid t0:t1:steps");
  };

  auto* simulate = app.add_subcommand("simulate", "sample a trajectory ensemble");
  add_common(simulate, true);
  auto* survival = app.add_subcommand("survival", "survival and waiting density grid");
  add_common(survival, true);
  auto* counts = app.add_subcommand("counts", "count distribution P[N(t)=m]");
  add_common(counts, true);
  auto* exclusive =
      app.add_subcommand("exclusive", "exclusive density of the supplied trajectory");
  add_common(exclusive, true);
  auto* revival = app.add_subcommand("revival", "first-jump probabilities and distances");
  add_common(revival, true);
  auto* walk = app.add_subcommand("walk", "hybrid walk ensemble and rate equation");
  add_common(walk, true);
  auto* verify = app.add_subcommand("verify", "run the built-in oracle checks");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (simulate->parsed()) return cmd_simulate(opt);
  if (survival->parsed()) return cmd_survival(opt);
  if (counts->parsed()) return cmd_counts(opt);
  if (exclusive->parsed()) return cmd_exclusive(opt);
  if (revival->parsed()) return cmd_revival(opt);
  if (walk->parsed()) return cmd_walk(opt);
  if (verify->parsed()) return cmd_verify(opt);
  return 2;
}
