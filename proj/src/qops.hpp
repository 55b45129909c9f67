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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace qjt::qops {

Matrix dagger(const Matrix& m);
Matrix hermitize(const Matrix& m);
double hermiticity_defect(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);
bool all_finite(const Matrix& m);

/// Fixed 2x2 operators in the basis (|1>, |0>), |1> excited first.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix sigma_plus();
Matrix sigma_minus();
Matrix projector_excited();  // P1 = sigma+ sigma-
Matrix projector_ground();   // P0 = sigma- sigma+

/// Matrix exponential. Dimension 2 uses the traceless closed form,
/// everything else Eigen's scaling-and-squaring Pade code.
Matrix expm(const Matrix& a);

/// Fixed-size variant of the 2x2 closed form; allocation free, for the
/// samplers' inner loops.
Eigen::Matrix2cd expm_fixed2(const Eigen::Matrix2cd& a);

/// Positive semidefinite square root of a Hermitian matrix; eigenvalues
/// below -tol.positivity are rejected, small negatives are clamped to zero.
Matrix sqrt_psd(const Matrix& hermitian, const Tolerances& tol = default_tolerances());

/// Trace distance (sum |eigenvalues of a - b|) / 2 between Hermitian matrices.
double trace_distance(const Matrix& a, const Matrix& b);

/// Conditional state rho(t) or unnormalized sigma(t).
struct DensityOperator {
  Matrix mat;
  bool normalized = true;

  static DensityOperator create(Matrix m, bool normalized = true,
                                const Tolerances& tol = default_tolerances());
  int dim() const { return static_cast<int>(mat.rows()); }
  double trace() const { return mat.trace().real(); }
};

/// Normalized pure-state density |v><v| / ||v||^2.
DensityOperator pure_state(const Vector& v);

/// Finite Kraus family K_j; as a map rho -> sum_j K_j rho K_j^dag it is
/// completely positive and trace non-increasing.
struct QuantumChannel {
  std::vector<Matrix> kraus;
  Matrix completeness_defect;  // 1 - sum_j K_j^dag K_j

  static QuantumChannel create(std::vector<Matrix> kraus,
                               const Tolerances& tol = default_tolerances());
  int dim() const { return static_cast<int>(kraus.front().rows()); }
};

Matrix apply_channel(const QuantumChannel& channel, const Matrix& rho);

/// sum_j K_j^dag K_j, the adjoint map applied to the identity.
Matrix channel_adjoint_identity(const QuantumChannel& channel);

struct JumpChannel {
  std::string label;
  double rate = 0.0;  // nu_u > 0
  QuantumChannel channel;
};

/// GKSL smooth part (H, {L_k}) plus labeled jump channels with rates nu_u.
struct JumpModel {
  int dim = 0;
  Matrix hamiltonian;
  std::vector<Matrix> smooth_lindblads;
  std::vector<JumpChannel> jump_channels;

  Matrix rate_operator;         // R  = sum_u nu_u sum_j J_j(u)^dag J_j(u)
  Matrix smooth_rate_operator;  // R0 = sum_k L_k^dag L_k
  double total_rate = 0.0;      // nu = sum_u nu_u

  static JumpModel create(Matrix hamiltonian, std::vector<Matrix> smooth_lindblads,
                          std::vector<JumpChannel> jump_channels,
                          const Tolerances& tol = default_tolerances());
};

/// L[rho] = -i[H,rho] + sum_k L_k rho L_k^dag - {R0,rho}/2
///          + sum_u nu_u J(u)[rho] - {R,rho}/2
Matrix apply_generator(const JumpModel& model, const Matrix& rho);

/// Jump gain alone: G[rho] = sum_u nu_u J(u)[rho].
Matrix apply_gain(const JumpModel& model, const Matrix& rho);

/// No-jump part: A[rho] = L[rho] - G[rho].
Matrix apply_no_jump_generator(const JumpModel& model, const Matrix& rho);

/// A linear map on density matrices, applied in Kraus/commutator form.
/// The dim^2 x dim^2 matrix representation is materialized lazily and only
/// when the exponential actually needs it; two-sided maps
/// rho -> F rho + rho F^dag keep the dim x dim effective Hamiltonian
/// (F = -i H_eff) instead, which makes the exponential a dim x dim problem.
class Superoperator {
 public:
  static Superoperator no_jump(const JumpModel& model);
  static Superoperator full(const JumpModel& model);
  /// rho -> -i H_eff rho + i rho H_eff^dag
  static Superoperator two_sided(Matrix h_eff);
  static Superoperator from_apply(int dim, std::function<Matrix(const Matrix&)> fn);

  Matrix apply(const Matrix& rho) const;
  int dim() const { return dim_; }
  bool has_effective_hamiltonian() const { return h_eff_.has_value(); }
  const Matrix& effective_hamiltonian() const { return *h_eff_; }
  /// dim^2 x dim^2 representation acting on column-major vec(rho).
  const Matrix& matrix() const;

 private:
  Superoperator() = default;
  int dim_ = 0;
  std::function<Matrix(const Matrix&)> apply_;
  std::optional<Matrix> h_eff_;
  mutable std::optional<Matrix> matrix_rep_;
};

/// exp(dt * A)[rho]. Hermitian input is re-symmetrized on output to suppress
/// roundoff drift. dt must be >= 0.
Matrix propagate(const Superoperator& generator, const Matrix& rho, double dt);

/// Column-major vectorization helpers for superoperator representations.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);
Matrix kron(const Matrix& a, const Matrix& b);

/// Matrix form of rho -> A rho B.
Matrix sandwich_rep(const Matrix& a, const Matrix& b);
/// Matrix form of rho -> -{W, rho}/2.
Matrix anticommutator_rep(const Matrix& w);

}  // namespace qjt::qops
