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

#include <memory>

#include "engine.hpp"

namespace qjt::renewal {

/// One labeled outcome u of a jump instrument: weight nu_u and Kraus-like
/// operators O_j(u). The whole instrument must satisfy
/// sum_u nu_u sum_j O_j(u)^dag O_j(u) = 1.
struct LabeledOperation {
  std::string label;
  double weight = 1.0;
  std::vector<Matrix> ops;
};

/// Per-jump-count data: the smooth GKSL part driving segment m (after m
/// jumps) and the instrument applied at jump m+1.
struct Stage {
  Matrix hamiltonian;
  std::vector<Matrix> lindblads;
  std::vector<LabeledOperation> instrument;
};

/// Dynamics with prescribed jump-time laws: the counting process is a
/// renewal process with gap laws f_i, independent of the quantum state;
/// only the jump labels and the conditional states depend on it.
struct InterspersedModel {
  int dim = 0;
  std::vector<Stage> stages;                 // index clamps to the last entry
  std::vector<pointproc::RenewalLaw> laws;   // law for gap i (1-based), clamps

  const Stage& stage(std::size_t jumps_done) const;
  const pointproc::RenewalLaw& law(std::size_t gap) const;
  bool trivial_smooth() const;  // every stage: H = 0 and no Lindblads
  bool uniform() const { return stages.size() == 1 && laws.size() == 1; }
};

InterspersedModel build_interspersed(int dim, std::vector<Stage> stages,
                                     std::vector<pointproc::RenewalLaw> laws,
                                     const Tolerances& tol = default_tolerances());

/// Two-level revival model: trivial smooth part, jump instrument
/// E0[rho] = s+ rho s- (label "0") plus E1[rho] = s- rho s+ (label "1").
struct RevivalModel {
  pointproc::RenewalLaw law;
  InterspersedModel model;

  static RevivalModel create(pointproc::RenewalLaw law);
};

/// Sample a trajectory: jump times from the renewal laws, labels with
/// probability nu_u V(u,t), states updated by O(u)[rho]/V(u,t).
engine::TrajectoryRecord simulate_interspersed(const InterspersedModel& model,
                                               const qops::DensityOperator& rho0,
                                               double horizon,
                                               pointproc::RngStream& rng);

/// Exclusive probability density of a whole trajectory:
/// (1 - F_{m+1}(t - t_m)) prod_i f_i(dt_i) tr{O-chain[rho0]}.
double exclusive_density_interspersed(const InterspersedModel& model,
                                      const qops::DensityOperator& rho0,
                                      const engine::Trajectory& trajectory);

/// Grid evaluator for the mean-state recursion and the event instruments.
/// The eta-tilde cascade is integrated on a uniform grid over
/// [0, inner_horizon] by trapezoid convolutions, run at two resolutions and
/// Richardson extrapolated; queries must land on grid nodes (all tabulated
/// scalars extend to outer_horizon).
class InterspersedEvaluator {
 public:
  InterspersedEvaluator(const InterspersedModel& model,
                        const qops::DensityOperator& rho0, double inner_horizon,
                        double outer_horizon, int m_max = 30, int grid = 512);
  ~InterspersedEvaluator();
  InterspersedEvaluator(InterspersedEvaluator&&) noexcept;

  /// Mean state eta(t); t in [0, inner_horizon] on the grid.
  Matrix mean_state(double t) const;
  /// P[exactly one jump in (t0,t), label in `labels`, any history in (0,t0)].
  /// Requires a uniform model (single stage, single law).
  double event_probability(const std::vector<std::string>& labels, double t0,
                           double t) const;
  /// P[N(t) - N(t0) >= 1 and the first jump after t0 has the given label],
  /// one entry per instrument label. Requires a uniform model.
  std::vector<double> first_jump_probabilities(double t0, double t) const;
  /// P[N(t) - N(t0) >= 1]; state independent.
  double total_jump_probability(double t0, double t) const;

  const std::vector<std::string>& labels() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Mean state by the survival-weighted eta-tilde recursion, truncated at
/// m_max with the remainder certified via tail_remainder.
qops::DensityOperator mean_state_interspersed(const InterspersedModel& model,
                                              const qops::DensityOperator& rho0,
                                              double t, int m_max = 30,
                                              int grid = 512);

/// P[exactly one jump in (t0,t) with label in `labels`] for uniform models.
double event_probability(const InterspersedModel& model,
                         const qops::DensityOperator& rho0,
                         const std::vector<std::string>& labels, double t0, double t,
                         int m_max = 30, int grid = 512);

/// P_i(t0, t | rho0) for the revival events "first jump after t0 is of
/// type i", i = 0, 1.
std::pair<double, double> revival_probabilities(const RevivalModel& model,
                                                const qops::DensityOperator& rho0,
                                                double t0, double t, int m_max = 30,
                                                int grid = 512);

struct Distances {
  double kolmogorov = 0.0;
  double trace = 0.0;
};

/// Kolmogorov distance of the first-jump-type probabilities for the two
/// reference initial states, and the trace distance of their mean states.
Distances distances(const RevivalModel& model, double t0, double t, int m_max = 30,
                    int grid = 512);

/// The reference initial-state pair: ground |0><0| and excited |1><1|.
qops::DensityOperator reference_state_ground();
qops::DensityOperator reference_state_excited();

/// Jump-model adapter for uniform exponential-law models (constant hazard).
qops::JumpModel to_jump_model(const InterspersedModel& model);

}  // namespace qjt::renewal
