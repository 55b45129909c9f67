/*
 * Copyright 2026 qjt developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C API of the jump-trajectory simulation library. All functionality is
 * reached through opaque handles and status codes; the last error message is
 * kept per thread and readable via qjt_last_error().
 */

#ifndef QJT_QJT_H
#define QJT_QJT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct qjt_scenario qjt_scenario; /* parsed scenario document */
typedef struct qjt_table qjt_table;       /* rectangular result table */

typedef enum qjt_status {
  QJT_OK = 0,
  QJT_ERROR_ARGUMENT = 1,
  QJT_ERROR_VALIDATION = 2, /* scenario or model rejected */
  QJT_ERROR_NUMERIC = 3,    /* quadrature/overflow failure */
  QJT_ERROR_VERIFY = 4,     /* verification suite reported failures */
  QJT_ERROR_IO = 5
} qjt_status;

const char* qjt_version(void);

/* Message describing the most recent failure on this thread. */
const char* qjt_last_error(void);

/* --- scenarios ----------------------------------------------------------- */

qjt_status qjt_scenario_load_file(const char* path, qjt_scenario** out);
qjt_status qjt_scenario_load_string(const char* json_text, qjt_scenario** out);
/* Serialized JSON; free with qjt_string_free. */
char* qjt_scenario_to_json(const qjt_scenario* scenario);
void qjt_scenario_free(qjt_scenario* scenario);
void qjt_string_free(char* text);

qjt_status qjt_scenario_set_seed(qjt_scenario* scenario, uint64_t seed);
qjt_status qjt_scenario_set_trajectories(qjt_scenario* scenario, uint64_t count);

/* 1 when the scenario requests the named output table (an empty `outputs`
 * list requests everything). */
int qjt_scenario_wants(const qjt_scenario* scenario, const char* table_name);

typedef struct qjt_grid {
  double t0;
  double t1;
  int64_t steps;
} qjt_grid;

/* --- operations ----------------------------------------------------------- */

/* Trajectory ensemble -> events and states tables. `workers` >= 1 changes
 * wall time only; outputs are byte-identical for any worker count. */
qjt_status qjt_run_simulate(const qjt_scenario* scenario, int workers,
                            qjt_table** events, qjt_table** states);

/* Survival probability and waiting density on a grid (NULL grid uses the
 * scenario's). The waiting-time moments are written when the pointers are
 * non-NULL; infinite moments signal a positive probability of no jump. */
qjt_status qjt_run_survival(const qjt_scenario* scenario, const qjt_grid* grid,
                            qjt_table** out, double* mean, double* variance,
                            double* tail);

/* Count distribution P[N(t) = m] with the certified remainder row. */
qjt_status qjt_run_counts(const qjt_scenario* scenario, qjt_table** out);

/* Exclusive probability density of the scenario's trajectory. */
qjt_status qjt_run_exclusive(const qjt_scenario* scenario, double* density);

/* Revival analysis over a (t0, t) grid. */
qjt_status qjt_run_revival(const qjt_scenario* scenario, const qjt_grid* grid,
                           qjt_table** out);

/* Hybrid-walk ensemble vs the vertex-resolved rate equation. */
qjt_status qjt_run_walk(const qjt_scenario* scenario, int workers, qjt_table** out);

/* Built-in oracle verification; returns QJT_ERROR_VERIFY when a check fails
 * (the report table is produced either way). */
qjt_status qjt_run_verify(qjt_table** report);

/* --- tables ---------------------------------------------------------------- */

int64_t qjt_table_rows(const qjt_table* table);
int64_t qjt_table_cols(const qjt_table* table);
const char* qjt_table_name(const qjt_table* table);
const char* qjt_table_column(const qjt_table* table, int64_t col);
const char* qjt_table_cell(const qjt_table* table, int64_t row, int64_t col);
qjt_status qjt_table_write_csv(const qjt_table* table, const char* path);
void qjt_table_free(qjt_table* table);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QJT_QJT_H */
