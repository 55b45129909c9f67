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

#include <map>

#include "engine.hpp"

namespace qjt::walk {

/// One jump type of the walk: active set F_u (the keys of `targets`),
/// target vertex per active vertex, and the per-vertex Kraus family.
struct WalkLabel {
  std::string name;
  double rate = 1.0;                          // nu_u
  std::map<int, int> targets;                 // active vertex -> destination
  std::map<int, std::vector<Matrix>> kraus;   // active vertex -> {J_j(x,u)}
};

/// Hybrid walk on a finite vertex set: classical position jumping on the
/// graph, quantum state dragged along by vertex-dependent channels.
/// Vertex coordinates are carried for bookkeeping only; the dynamics sees
/// vertices as labels.
struct WalkModel {
  int dim = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Matrix> vertex_hamiltonians;
  std::vector<std::vector<Matrix>> vertex_lindblads;
  std::vector<WalkLabel> labels;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  /// R(x) = sum_u nu_u 1_{F_u}(x) sum_j J^dag J.
  Matrix rate_operator(int vertex) const;
  /// True when no label is active at the vertex (the absorbing set F_0).
  bool absorbing(int vertex) const;

  static WalkModel create(int dim, std::vector<Eigen::VectorXd> vertices,
                          std::vector<Matrix> vertex_hamiltonians,
                          std::vector<std::vector<Matrix>> vertex_lindblads,
                          std::vector<WalkLabel> labels,
                          const Tolerances& tol = default_tolerances());
};

struct HybridState {
  int vertex = 0;
  qops::DensityOperator rho;
};

/// Vertex-indexed unnormalized states eta_k(t); total trace is conserved.
struct RateVector {
  std::vector<Matrix> etas;
  double total_trace() const;
};

/// Classical transition-rate matrix T(k,l) of the marginal Pauli equation.
Eigen::MatrixXd pauli_rates(const WalkModel& model);

/// Integrate the vertex-resolved rate equation
/// d eta_k/dt = L0_k[eta_k] + sum_l (T(k,l)[eta_l] - {T(l,k)*[1], eta_k}/2)
/// as one block superoperator (exponential up to 4096 stacked dimensions,
/// adaptive RK beyond).
RateVector lindblad_rate_evolve(const WalkModel& model, const RateVector& init,
                                double t);

/// Truncated Dyson expansion of the same solution: per-jump-count stage
/// cascade; returns the per-count vertex blocks so the truncation deficit
/// can be certified from the trace.
std::vector<RateVector> lindblad_rate_dyson(const WalkModel& model,
                                            const RateVector& init, double t,
                                            int m_max);

struct HybridRecord {
  engine::Trajectory trajectory;
  std::vector<int> vertex_path;  // vertex after each jump
  std::vector<qops::DensityOperator> states;
  std::vector<double> weights;
  int final_vertex = 0;
  double survival_log = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

/// Sample the hybrid process: vertex constant between jumps, rho evolving
/// under the vertex no-jump flow; jumps move the vertex and reset rho.
HybridRecord simulate_hybrid(const WalkModel& model, const HybridState& init,
                             double horizon, pointproc::RngStream& rng);

/// tr{exp(dt A(x))[rho]}: no-jump probability at the current vertex.
double vertex_waiting(const WalkModel& model, const HybridState& state, double dt);

/// Conditional hybrid state at time t along a recorded trajectory.
HybridState hybrid_state_at(const WalkModel& model, const HybridState& init,
                            const HybridRecord& record, double t);

enum class TwoLevelCase { sigma_z, sigma_x };

/// The two-vertex qubit walk: jump channel g0 E0 at x(0), g1 E1 at x(1),
/// Hamiltonian (omega_k/2) sigma_z or sigma_x per vertex, nu_k = nu g_k.
WalkModel two_level_example(TwoLevelCase which, double omega0, double omega1,
                            double nu0, double nu1);

enum class SpectralKind { real_pair, exceptional, imaginary_pair };

struct TwoLevelInfo {
  double kappa[2];          // (omega_k^2 - nu_k^2/4)/4 per vertex
  SpectralKind regime[2];
};

TwoLevelInfo two_level_info(TwoLevelCase which, double omega0, double omega1,
                            double nu0, double nu1);

/// Exact embedding of the hybrid system as a plain jump model on the
/// n*dim-dimensional space (vertex sectors as diagonal blocks), for
/// cross-checks with the generic engine.
qops::JumpModel to_jump_model(const WalkModel& model);

/// Block-diagonal embedding of a hybrid state into the n*dim space.
qops::DensityOperator embed_state(const WalkModel& model, const HybridState& state);

/// Per-vertex blocks of an n*dim matrix, as a RateVector.
RateVector split_blocks(const WalkModel& model, const Matrix& embedded);

}  // namespace qjt::walk
