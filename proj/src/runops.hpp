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

#include "scenario.hpp"
#include "tables.hpp"

namespace qjt::runops {

struct SimulationTables {
  tables::Table events;  // traj_id, jump_index, time, label
  tables::Table states;  // traj_id, index, time, vertex, rho entries
};

/// Trajectory ensemble; `workers` only affects wall time, the outputs are
/// merged in trajectory order and are byte-identical for any worker count.
SimulationTables run_simulate(const scenario::Scenario& scenario, int workers);

struct WaitingSummary {
  double mean = 0.0;
  double variance = 0.0;
  double tail = 0.0;  // P[T = +infinity]
};

/// Survival probability and waiting density on a time grid, plus the moments
/// of the waiting time computed by quadrature.
std::pair<tables::Table, WaitingSummary> run_survival(
    const scenario::Scenario& scenario, const scenario::GridSpec* grid_override);

/// P[N(t) = m] table with the certified truncation remainder as a final row.
tables::Table run_counts(const scenario::Scenario& scenario);

/// Exclusive probability density of the scenario's supplied trajectory.
double run_exclusive(const scenario::Scenario& scenario);

/// Revival analysis over a (t0, t) grid: first-jump-type probabilities for
/// the reference state pair, Kolmogorov distance, trace distance.
tables::Table run_revival(const scenario::Scenario& scenario,
                          const scenario::GridSpec* grid_override);

/// Hybrid walk ensemble against the vertex-resolved rate equation.
tables::Table run_walk(const scenario::Scenario& scenario, int workers);

}  // namespace qjt::runops
