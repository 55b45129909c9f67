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

#include "pointproc.hpp"
#include "qops.hpp"

namespace qjt::engine {

struct Event {
  std::string label;
  double time = 0.0;
};

/// Typical trajectory: ordered jump record on [0, horizon).
struct Trajectory {
  std::vector<Event> events;
  double horizon = 0.0;

  /// Checks 0 < t_1 < ... < t_m < horizon.
  void validate() const;
};

struct TrajectoryRecord {
  Trajectory trajectory;
  /// Conditional state after each jump, plus the state at the horizon.
  std::vector<qops::DensityOperator> states;
  /// Intensity factor I(u_j, t_j) at each jump.
  std::vector<double> weights;
  /// Accumulated integral of lambda along the trajectory.
  double survival_log = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

struct JumpResult {
  qops::DensityOperator state;
  double intensity = 0.0;
  bool forbidden = false;
};

/// State transform at a jump of the given label: I = tr J(u)[rho]; the
/// normalized update when I > 0, a flagged forbidden result when I = 0.
JumpResult jump_update(const qops::JumpModel& model, const std::string& label,
                       const qops::DensityOperator& rho);

/// tr{exp(dt A)[rho]}: probability of no jump in a window of length dt.
double survival_probability(const qops::JumpModel& model,
                            const qops::DensityOperator& rho, double dt);

/// lambda(dt) * survival = tr{R exp(dt A)[rho]}: waiting-time density.
double waiting_density(const qops::JumpModel& model, const qops::DensityOperator& rho,
                       double dt);

/// Survival closure for the no-jump flow started from rho, with the tail
/// estimated on a geometric grid and a 1/lambda time scale.
pointproc::SurvivalFunction make_survival(const qops::JumpModel& model,
                                          const qops::DensityOperator& rho);

/// Sample one physical-probability trajectory on [0, horizon): waiting times
/// by survival inversion, labels by nu_u I(u,t)/lambda(t), states by
/// jump_update. Draws beyond the horizon are censored.
TrajectoryRecord sample_trajectory(const qops::JumpModel& model,
                                   const qops::DensityOperator& rho0, double horizon,
                                   pointproc::RngStream& rng);

/// Deterministic replay of a supplied trajectory up to time t.
qops::DensityOperator conditional_state(const qops::JumpModel& model,
                                        const qops::DensityOperator& rho0,
                                        const Trajectory& trajectory, double t);

/// tr{S(t,t_m) J(u_m) ... J(u_1) S(t_1,0)[rho0]}, the density of exactly
/// these jumps and no others, w.r.t. prod_j nu_{u_j} dt_j.
double exclusive_density(const qops::JumpModel& model, const qops::DensityOperator& rho0,
                         const Trajectory& trajectory);

struct CountDistribution {
  std::vector<double> probabilities;  // P[N(t) = m], m = 0..m_max
  double remainder = 0.0;             // 1 - sum, certified truncation deficit
  /// Unnormalized per-event means D_m(t)[rho0]; they sum to the mean state.
  std::vector<Matrix> event_means;
};

/// P[N(t) = m] for m = 0..m_max. The nested Dyson integrals are evaluated
/// exactly through the lower-triangular block semigroup
/// d xi_m/dt = A xi_m + G xi_{m-1}.
CountDistribution count_distribution(const qops::JumpModel& model,
                                     const qops::DensityOperator& rho0, double t,
                                     int m_max);

/// A priori state exp(t L)[rho0].
qops::DensityOperator mean_state(const qops::JumpModel& model,
                                 const qops::DensityOperator& rho0, double t);

/// Inverse-CDF pick over a finite weight vector; returns the index.
std::size_t pick_weighted(const std::vector<double>& weights, double total,
                          pointproc::RngStream& rng);

/// Evolves the cascade d xi_s/dt = diag xi_s + lower xi_{s-1} of vectorized
/// stage states, exactly via one block exponential when the stacked dimension
/// is at most block_cap, with adaptive RK45 beyond. Shared by the count
/// distribution and the truncated Dyson expansions.
std::vector<Vector> evolve_cascade(const Matrix& diag_rep, const Matrix& lower_rep,
                                   const std::vector<Vector>& initial, double t,
                                   int block_cap = 4096);

}  // namespace qjt::engine
