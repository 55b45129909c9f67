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

#include "runops.hpp"

#include <cmath>
#include <thread>

#include "ode.hpp"

namespace qjt::runops {

using scenario::Built;
using scenario::Scenario;
using tables::format_double;
using tables::format_integer;
using tables::Table;

namespace {

// One sampled trajectory flattened to rows.
struct TrajectoryRows {
  std::vector<std::array<std::string, 4>> events;
  std::vector<std::vector<std::string>> states;
};

void append_state_row(std::vector<std::vector<std::string>>& rows, long long traj,
                      long long index, double time, int vertex, const Matrix& rho) {
  std::vector<std::string> row;
  row.reserve(4 + 2 * rho.size());
  row.push_back(format_integer(traj));
  row.push_back(format_integer(index));
  row.push_back(format_double(time));
  row.push_back(format_integer(vertex));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      row.push_back(format_double(rho(i, j).real()));
      row.push_back(format_double(rho(i, j).imag()));
    }
  }
  rows.push_back(std::move(row));
}

TrajectoryRows sample_one(const Built& built, const Scenario& scenario,
                          std::uint64_t index) {
  pointproc::RngStream rng(scenario.seed, index);
  TrajectoryRows rows;
  const long long traj = static_cast<long long>(index);

  auto record_events = [&](const engine::Trajectory& trajectory) {
    for (std::size_t j = 0; j < trajectory.events.size(); ++j) {
      rows.events.push_back({format_integer(traj), format_integer((long long)j),
                             format_double(trajectory.events[j].time),
                             trajectory.events[j].label});
    }
  };

  switch (built.kind) {
    case Built::Kind::generic:
    case Built::Kind::effective_nh: {
      const auto rec = engine::sample_trajectory(*built.jump_model, built.initial,
                                                 scenario.horizon, rng);
      if (rec.aborted) throw NumericError("trajectory aborted: " + rec.abort_reason);
      record_events(rec.trajectory);
      for (std::size_t j = 0; j < rec.trajectory.events.size(); ++j) {
        append_state_row(rows.states, traj, (long long)j, rec.trajectory.events[j].time,
                         -1, rec.states[j].mat);
      }
      append_state_row(rows.states, traj, (long long)rec.trajectory.events.size(),
                       scenario.horizon, -1, rec.states.back().mat);
      break;
    }
    case Built::Kind::interspersed:
    case Built::Kind::revival: {
      const auto rec = renewal::simulate_interspersed(*built.interspersed, built.initial,
                                                      scenario.horizon, rng);
      if (rec.aborted) throw NumericError("trajectory aborted: " + rec.abort_reason);
      record_events(rec.trajectory);
      for (std::size_t j = 0; j < rec.trajectory.events.size(); ++j) {
        append_state_row(rows.states, traj, (long long)j, rec.trajectory.events[j].time,
                         -1, rec.states[j].mat);
      }
      append_state_row(rows.states, traj, (long long)rec.trajectory.events.size(),
                       scenario.horizon, -1, rec.states.back().mat);
      break;
    }
    case Built::Kind::walk: {
      const auto rec = walk::simulate_hybrid(
          *built.walk_model, {built.initial_vertex, built.initial}, scenario.horizon,
          rng);
      if (rec.aborted) throw NumericError("trajectory aborted: " + rec.abort_reason);
      record_events(rec.trajectory);
      for (std::size_t j = 0; j < rec.trajectory.events.size(); ++j) {
        append_state_row(rows.states, traj, (long long)j, rec.trajectory.events[j].time,
                         rec.vertex_path[j], rec.states[j].mat);
      }
      const int final_vertex = rec.final_vertex;
      append_state_row(rows.states, traj, (long long)rec.trajectory.events.size(),
                       scenario.horizon, final_vertex, rec.states.back().mat);
      break;
    }
  }
  return rows;
}

std::vector<std::string> state_columns(int dim) {
  std::vector<std::string> cols = {"traj_id", "index", "time", "vertex"};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      cols.push_back("rho_re_" + std::to_string(i) + std::to_string(j));
      cols.push_back("rho_im_" + std::to_string(i) + std::to_string(j));
    }
  }
  return cols;
}

// Fan the trajectory indices out over workers; merge by index order so that
// the byte output does not depend on the worker count.
std::vector<TrajectoryRows> run_ensemble(const Built& built, const Scenario& scenario,
                                         int workers) {
  const std::uint64_t n = scenario.trajectories;
  std::vector<TrajectoryRows> all(n);
  workers = std::max(1, workers);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) all[i] = sample_one(built, scenario, i);
    return all;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::uint64_t i = w; i < n; i += workers) {
          all[i] = sample_one(built, scenario, i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return all;
}

double survival_at(const Built& built, double t) {
  switch (built.kind) {
    case Built::Kind::generic:
      return engine::survival_probability(*built.jump_model, built.initial, t);
    case Built::Kind::effective_nh:
      if (built.c2) return nonh::survival(*built.c2, built.initial, t);
      return engine::survival_probability(*built.jump_model, built.initial, t);
    case Built::Kind::interspersed:
    case Built::Kind::revival:
      return built.interspersed->law(1).survival(t);
    case Built::Kind::walk:
      return walk::vertex_waiting(*built.walk_model,
                                  {built.initial_vertex, built.initial}, t);
  }
  return 0.0;
}

double waiting_density_at(const Built& built, double t) {
  switch (built.kind) {
    case Built::Kind::generic:
      return engine::waiting_density(*built.jump_model, built.initial, t);
    case Built::Kind::effective_nh:
      if (built.c2) return nonh::waiting_density_nh(*built.c2, built.initial, t);
      return engine::waiting_density(*built.jump_model, built.initial, t);
    case Built::Kind::interspersed:
    case Built::Kind::revival:
      return built.interspersed->law(1).pdf(t);
    case Built::Kind::walk:
      return engine::waiting_density(built.require_jump_model(),
                                     built.jump_model_initial(), t);
  }
  return 0.0;
}

}  // namespace

SimulationTables run_simulate(const Scenario& scenario, int workers) {
  const Built built = scenario::build(scenario);
  const auto rows = run_ensemble(built, scenario, workers);

  SimulationTables out;
  out.events.name = "events";
  out.events.columns = {"traj_id", "jump_index", "time", "label"};
  out.states.name = "states";
  out.states.columns = state_columns(built.initial.dim());
  for (const auto& traj : rows) {
    for (const auto& ev : traj.events) {
      out.events.add_row({ev[0], ev[1], ev[2], ev[3]});
    }
    for (const auto& st : traj.states) out.states.rows.push_back(st);
  }
  return out;
}

std::pair<Table, WaitingSummary> run_survival(const Scenario& scenario,
                                              const scenario::GridSpec* grid_override) {
  const Built built = scenario::build(scenario);
  scenario::GridSpec grid = scenario.grid;
  if (grid_override) grid = *grid_override;
  if (!grid.present) {
    grid.t0 = 0.0;
    grid.t1 = scenario.horizon;
    grid.steps = 100;
    grid.present = true;
  }

  Table table;
  table.name = "waiting";
  table.columns = {"time", "survival", "density"};
  for (int i = 0; i <= grid.steps; ++i) {
    const double t = grid.t0 + (grid.t1 - grid.t0) * i / grid.steps;
    table.add_row({format_double(t), format_double(survival_at(built, t)),
                   format_double(waiting_density_at(built, t))});
  }

  // Moments by quadrature on the survival function: E[T^k] from
  // integrals of t^(k-1) S(t) when the tail vanishes.
  WaitingSummary summary;
  auto surv = [&](double t) { return survival_at(built, t); };
  const double lambda0 = std::max(waiting_density_at(built, 0.0), 1e-6);
  const double scale = 1.0 / lambda0;
  summary.tail = pointproc::estimate_tail(surv, scale);
  if (summary.tail > 1e-12) {
    summary.mean = pointproc::kInfiniteTime;
    summary.variance = pointproc::kInfiniteTime;
    return {std::move(table), summary};
  }
  double t_star = scale;
  while (surv(t_star) > 1e-12 && t_star < 1e7 * scale) t_star *= 2.0;
  const double m1 = detail::adaptive_simpson(surv, 0.0, t_star, 1e-11 * t_star);
  const double m2 = 2.0 * detail::adaptive_simpson(
                              [&](double t) { return t * surv(t); }, 0.0, t_star,
                              1e-11 * t_star * t_star);
  summary.mean = m1;
  summary.variance = m2 - m1 * m1;
  return {std::move(table), summary};
}

Table run_counts(const Scenario& scenario) {
  const Built built = scenario::build(scenario);
  const double t = scenario.counts.time;
  const int m_max = scenario.counts.m_max;

  Table table;
  table.name = "counts";
  table.columns = {"quantity", "m", "value"};

  std::vector<double> pmf;
  double remainder = 0.0;
  if (built.kind == Built::Kind::interspersed || built.kind == Built::Kind::revival) {
    pmf = pointproc::renewal_count_pmf(built.interspersed->laws, m_max, t);
    double sum = 0.0;
    for (const double p : pmf) sum += p;
    remainder = std::clamp(1.0 - sum, 0.0, 1.0);
  } else {
    const auto dist = engine::count_distribution(built.require_jump_model(),
                                                 built.jump_model_initial(), t, m_max);
    pmf = dist.probabilities;
    remainder = dist.remainder;
  }
  for (std::size_t m = 0; m < pmf.size(); ++m) {
    table.add_row({"P", format_integer((long long)m), format_double(pmf[m])});
  }
  table.add_row({"remainder", format_integer(-1), format_double(remainder)});
  return table;
}

double run_exclusive(const Scenario& scenario) {
  if (!scenario.trajectory.present) {
    throw ValidationError(".trajectory", "the exclusive operation needs a trajectory");
  }
  const Built built = scenario::build(scenario);
  engine::Trajectory traj;
  traj.events = scenario.trajectory.events;
  traj.horizon = scenario.horizon;
  if (built.kind == Built::Kind::interspersed || built.kind == Built::Kind::revival) {
    return renewal::exclusive_density_interspersed(*built.interspersed, built.initial,
                                                   traj);
  }
  return engine::exclusive_density(built.require_jump_model(),
                                   built.jump_model_initial(), traj);
}

Table run_revival(const Scenario& scenario, const scenario::GridSpec* grid_override) {
  const Built built = scenario::build(scenario);
  if (built.kind != Built::Kind::revival) {
    throw ValidationError(".model.type", "the revival operation needs a revival model");
  }
  scenario::GridSpec grid = scenario.grid;
  if (grid_override) grid = *grid_override;
  if (!grid.present) {
    grid.t0 = 0.0;
    grid.t1 = scenario.horizon;
    grid.steps = 8;
    grid.present = true;
  }
  const auto model = renewal::RevivalModel::create(*built.revival_law);

  Table table;
  table.name = "distances";
  table.columns = {"t0",       "t",        "p0_ground", "p1_ground", "p0_excited",
                   "p1_excited", "kolmogorov", "trace_distance"};
  for (int i = 0; i <= grid.steps; ++i) {
    const double t0 = grid.t0 + (grid.t1 - grid.t0) * i / grid.steps;
    for (int j = i + 1; j <= grid.steps; ++j) {
      const double t = grid.t0 + (grid.t1 - grid.t0) * j / grid.steps;
      const auto pg = renewal::revival_probabilities(
          model, renewal::reference_state_ground(), t0, t);
      const auto pe = renewal::revival_probabilities(
          model, renewal::reference_state_excited(), t0, t);
      const auto d = renewal::distances(model, t0, t);
      table.add_row({format_double(t0), format_double(t), format_double(pg.first),
                     format_double(pg.second), format_double(pe.first),
                     format_double(pe.second), format_double(d.kolmogorov),
                     format_double(d.trace)});
    }
  }
  return table;
}

Table run_walk(const Scenario& scenario, int workers) {
  const Built built = scenario::build(scenario);
  if (built.kind != Built::Kind::walk) {
    throw ValidationError(".model.type", "the walk operation needs a walk model");
  }
  const auto& model = *built.walk_model;
  scenario::GridSpec grid = scenario.grid;
  if (!grid.present) {
    grid.t0 = 0.0;
    grid.t1 = scenario.horizon;
    grid.steps = 20;
    grid.present = true;
  }

  // Monte Carlo ensemble, resolved at the grid times.
  const std::uint64_t n = scenario.trajectories;
  const int n_vertices = model.n_vertices();
  const int dim = model.dim;
  const int n_times = grid.steps + 1;
  std::vector<std::vector<Matrix>> mc(
      n_times, std::vector<Matrix>(n_vertices, Matrix::Zero(dim, dim)));
  std::vector<std::vector<long long>> occupation(
      n_times, std::vector<long long>(n_vertices, 0));

  workers = std::max(1, workers);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::vector<std::vector<Matrix>>> mc_local(
      workers, std::vector<std::vector<Matrix>>(
                   n_times, std::vector<Matrix>(n_vertices, Matrix::Zero(dim, dim))));
  std::vector<std::vector<std::vector<long long>>> occ_local(
      workers, std::vector<std::vector<long long>>(
                   n_times, std::vector<long long>(n_vertices, 0)));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::uint64_t i = w; i < n; i += workers) {
          pointproc::RngStream rng(scenario.seed, i);
          const auto rec = walk::simulate_hybrid(
              model, {built.initial_vertex, built.initial}, scenario.horizon, rng);
          for (int k = 0; k < n_times; ++k) {
            const double t = grid.t0 + (grid.t1 - grid.t0) * k / grid.steps;
            const auto state = walk::hybrid_state_at(
                model, {built.initial_vertex, built.initial}, rec, t);
            mc_local[w][k][state.vertex] += state.rho.mat;
            ++occ_local[w][k][state.vertex];
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (int w = 0; w < workers; ++w) {
    for (int k = 0; k < n_times; ++k) {
      for (int v = 0; v < n_vertices; ++v) {
        mc[k][v] += mc_local[w][k][v];
        occupation[k][v] += occ_local[w][k][v];
      }
    }
  }

  walk::RateVector init;
  init.etas.assign(n_vertices, Matrix::Zero(dim, dim));
  init.etas[built.initial_vertex] = built.initial.mat;

  Table table;
  table.name = "walk";
  table.columns = {"time", "vertex", "occupation_mc", "occupation_rate"};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const std::string suffix = std::to_string(i) + std::to_string(j);
      table.columns.push_back("eta_mc_re_" + suffix);
      table.columns.push_back("eta_mc_im_" + suffix);
      table.columns.push_back("eta_rate_re_" + suffix);
      table.columns.push_back("eta_rate_im_" + suffix);
    }
  }
  for (int k = 0; k < n_times; ++k) {
    const double t = grid.t0 + (grid.t1 - grid.t0) * k / grid.steps;
    const auto eta = walk::lindblad_rate_evolve(model, init, t);
    for (int v = 0; v < n_vertices; ++v) {
      std::vector<std::string> row = {
          format_double(t), format_integer(v),
          format_double(occupation[k][v] / static_cast<double>(n)),
          format_double(eta.etas[v].trace().real())};
      const Matrix mean_mc = mc[k][v] / static_cast<double>(n);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          row.push_back(format_double(mean_mc(i, j).real()));
          row.push_back(format_double(mean_mc(i, j).imag()));
          row.push_back(format_double(eta.etas[v](i, j).real()));
          row.push_back(format_double(eta.etas[v](i, j).imag()));
        }
      }
      table.add_row(std::move(row));
    }
  }
  return table;
}

}  // namespace qjt::runops
