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

#include "qops.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qjt::qops {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ArgumentError(std::string(what) + ": matrix must be square and nonempty");
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(what) + ": dimension mismatch");
  }
}

// Coefficients (c, s) with exp(B) = c*1 + s*B for traceless 2x2 B,
// where xi is the scalar with B^2 = xi*1.
std::pair<Complex, Complex> traceless_exp_coeffs(Complex xi) {
  if (std::abs(xi) <= 1e-4) {
    Complex c{1.0, 0.0};
    Complex s{1.0, 0.0};
    Complex term_c{1.0, 0.0};
    Complex term_s{1.0, 0.0};
    for (int n = 1; n <= 8; ++n) {
      term_c *= xi / double((2 * n - 1) * (2 * n));
      term_s *= xi / double((2 * n) * (2 * n + 1));
      c += term_c;
      s += term_s;
    }
    return {c, s};
  }
  const Complex w = std::sqrt(xi);
  const Complex ew = std::exp(w);
  const Complex emw = 1.0 / ew;
  return {0.5 * (ew + emw), 0.5 * (ew - emw) / w};
}

template <typename Mat2>
Mat2 expm_2x2_impl(const Mat2& a) {
  const Complex mu = 0.5 * (a(0, 0) + a(1, 1));
  // B = a - mu*1 is traceless, so B^2 = (B00^2 + B01*B10)*1.
  const Complex b00 = a(0, 0) - mu;
  const Complex xi = b00 * b00 + a(0, 1) * a(1, 0);
  const auto [c, s] = traceless_exp_coeffs(xi);
  const Complex emu = std::exp(mu);
  Mat2 out(2, 2);
  out(0, 0) = emu * (c + s * b00);
  out(0, 1) = emu * s * a(0, 1);
  out(1, 0) = emu * s * a(1, 0);
  out(1, 1) = emu * (c - s * b00);
  return out;
}

}  // namespace

Eigen::Matrix2cd expm_fixed2(const Eigen::Matrix2cd& a) {
  return expm_2x2_impl<Eigen::Matrix2cd>(a);
}

Matrix dagger(const Matrix& m) { return m.adjoint(); }

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(hermitian),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

Matrix projector_excited() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  return m;
}

Matrix projector_ground() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1;
  return m;
}

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  if (!all_finite(a)) throw NumericError("expm: non-finite input");
  Matrix out;
  if (a.rows() == 1) {
    out = Matrix::Constant(1, 1, std::exp(a(0, 0)));
  } else if (a.rows() == 2) {
    out = expm_2x2_impl<Matrix>(a);
  } else {
    out = a.exp();
  }
  if (!all_finite(out)) throw NumericError("expm: overflow in matrix exponential");
  return out;
}

Matrix sqrt_psd(const Matrix& hermitian, const Tolerances& tol) {
  require_square(hermitian, "sqrt_psd");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(hermitian));
  Eigen::VectorXd evals = es.eigenvalues();
  for (int i = 0; i < evals.size(); ++i) {
    if (evals(i) < -tol.positivity) {
      throw ModelError("sqrt_psd: matrix is not positive semidefinite");
    }
    evals(i) = std::sqrt(std::max(evals(i), 0.0));
  }
  return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
}

DensityOperator DensityOperator::create(Matrix m, bool normalized,
                                        const Tolerances& tol) {
  require_square(m, "DensityOperator");
  if (!all_finite(m)) throw ModelError("DensityOperator: non-finite entries");
  if (m.rows() > tol.dim_cap) {
    throw ModelError("DensityOperator: dimension exceeds cap " +
                     std::to_string(tol.dim_cap));
  }
  if (hermiticity_defect(m) > tol.hermitian) {
    throw ModelError("DensityOperator: not Hermitian within tolerance");
  }
  Matrix h = hermitize(std::move(m));
  if (min_eigenvalue(h) < -tol.positivity) {
    throw ModelError("DensityOperator: negative eigenvalue beyond tolerance");
  }
  const double tr = h.trace().real();
  if (normalized) {
    if (std::abs(tr - 1.0) > tol.trace) {
      throw ModelError("DensityOperator: trace differs from 1 beyond tolerance");
    }
  } else if (tr <= 0.0 || tr > 1.0 + tol.trace) {
    throw ModelError("DensityOperator: unnormalized trace must lie in (0, 1]");
  }
  DensityOperator out;
  out.mat = std::move(h);
  out.normalized = normalized;
  return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "trace_distance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(Matrix(a - b)),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityOperator pure_state(const Vector& v) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw ArgumentError("pure_state: zero vector");
  return DensityOperator::create(Matrix(v * v.adjoint() / n2), true);
}

QuantumChannel QuantumChannel::create(std::vector<Matrix> kraus,
                                      const Tolerances& tol) {
  if (kraus.empty()) throw ModelError("QuantumChannel: empty Kraus family");
  require_square(kraus.front(), "QuantumChannel");
  const auto dim = kraus.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& k : kraus) {
    require_square(k, "QuantumChannel");
    if (k.rows() != dim) throw ModelError("QuantumChannel: mixed Kraus dimensions");
    if (!all_finite(k)) throw ModelError("QuantumChannel: non-finite Kraus entries");
    sum += k.adjoint() * k;
  }
  Matrix defect = Matrix::Identity(dim, dim) - sum;
  if (min_eigenvalue(defect) < -tol.channel_completeness) {
    throw ModelError("QuantumChannel: sum K^dag K exceeds identity (trace increasing)");
  }
  QuantumChannel out;
  out.kraus = std::move(kraus);
  out.completeness_defect = hermitize(defect);
  return out;
}

Matrix apply_channel(const QuantumChannel& channel, const Matrix& rho) {
  require_square(rho, "apply_channel");
  require_same_dim(channel.kraus.front(), rho, "apply_channel");
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : channel.kraus) out += k * rho * k.adjoint();
  return out;
}

Matrix channel_adjoint_identity(const QuantumChannel& channel) {
  const auto dim = channel.kraus.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& k : channel.kraus) sum += k.adjoint() * k;
  return sum;
}

JumpModel JumpModel::create(Matrix hamiltonian, std::vector<Matrix> smooth_lindblads,
                            std::vector<JumpChannel> jump_channels,
                            const Tolerances& tol) {
  require_square(hamiltonian, "JumpModel");
  const auto dim = hamiltonian.rows();
  if (dim > tol.dim_cap) {
    throw ModelError("JumpModel: dimension exceeds cap " + std::to_string(tol.dim_cap));
  }
  if (hermiticity_defect(hamiltonian) > tol.hermitian) {
    throw ModelError("JumpModel: Hamiltonian not Hermitian within tolerance");
  }
  Matrix r0 = Matrix::Zero(dim, dim);
  for (const auto& l : smooth_lindblads) {
    require_square(l, "JumpModel lindblad");
    if (l.rows() != dim) throw ModelError("JumpModel: lindblad dimension mismatch");
    r0 += l.adjoint() * l;
  }
  if (jump_channels.empty()) {
    throw ModelError("JumpModel: at least one jump channel is required (nu > 0)");
  }
  Matrix r = Matrix::Zero(dim, dim);
  double nu = 0.0;
  for (const auto& jc : jump_channels) {
    if (!(jc.rate > 0.0)) {
      throw ModelError("JumpModel: jump rate for label '" + jc.label +
                       "' must be > 0");
    }
    if (jc.channel.dim() != dim) {
      throw ModelError("JumpModel: jump channel dimension mismatch for label '" +
                       jc.label + "'");
    }
    r += jc.rate * channel_adjoint_identity(jc.channel);
    nu += jc.rate;
  }
  r = hermitize(r);
  if (min_eigenvalue(r) < -tol.positivity) {
    throw ModelError("JumpModel: rate operator R lost positivity");
  }
  JumpModel out;
  out.dim = static_cast<int>(dim);
  out.hamiltonian = hermitize(std::move(hamiltonian));
  out.smooth_lindblads = std::move(smooth_lindblads);
  out.jump_channels = std::move(jump_channels);
  out.rate_operator = std::move(r);
  out.smooth_rate_operator = hermitize(r0);
  out.total_rate = nu;
  return out;
}

Matrix apply_gain(const JumpModel& model, const Matrix& rho) {
  require_square(rho, "apply_gain");
  if (rho.rows() != model.dim) throw ArgumentError("apply_gain: dimension mismatch");
  Matrix out = Matrix::Zero(model.dim, model.dim);
  for (const auto& jc : model.jump_channels) {
    out += jc.rate * apply_channel(jc.channel, rho);
  }
  return out;
}

Matrix apply_no_jump_generator(const JumpModel& model, const Matrix& rho) {
  require_square(rho, "apply_no_jump_generator");
  if (rho.rows() != model.dim) {
    throw ArgumentError("apply_no_jump_generator: dimension mismatch");
  }
  Matrix out = -kI * (model.hamiltonian * rho - rho * model.hamiltonian);
  for (const auto& l : model.smooth_lindblads) out += l * rho * l.adjoint();
  const Matrix decay = model.smooth_rate_operator + model.rate_operator;
  out -= 0.5 * (decay * rho + rho * decay);
  return out;
}

Matrix apply_generator(const JumpModel& model, const Matrix& rho) {
  return apply_no_jump_generator(model, rho) + apply_gain(model, rho);
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix sandwich_rep(const Matrix& a, const Matrix& b) {
  // vec(A rho B) = (B^T kron A) vec(rho), column-major vec.
  return kron(b.transpose(), a);
}

Matrix anticommutator_rep(const Matrix& w) {
  const auto dim = w.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  return -0.5 * (kron(id, w) + kron(w.transpose(), id));
}

Superoperator Superoperator::no_jump(const JumpModel& model) {
  Superoperator s;
  s.dim_ = model.dim;
  if (model.smooth_lindblads.empty()) {
    // A[rho] = -i H_eff rho + i rho H_eff^dag with H_eff = H - (i/2) R.
    s.h_eff_ = model.hamiltonian - 0.5 * kI * model.rate_operator;
  }
  s.apply_ = [model](const Matrix& rho) { return apply_no_jump_generator(model, rho); };
  return s;
}

Superoperator Superoperator::full(const JumpModel& model) {
  Superoperator s;
  s.dim_ = model.dim;
  s.apply_ = [model](const Matrix& rho) { return apply_generator(model, rho); };
  return s;
}

Superoperator Superoperator::two_sided(Matrix h_eff) {
  require_square(h_eff, "Superoperator::two_sided");
  Superoperator s;
  s.dim_ = static_cast<int>(h_eff.rows());
  s.h_eff_ = std::move(h_eff);
  const Matrix f = *s.h_eff_;
  s.apply_ = [f](const Matrix& rho) { return -kI * f * rho + kI * rho * f.adjoint(); };
  return s;
}

Superoperator Superoperator::from_apply(int dim, std::function<Matrix(const Matrix&)> fn) {
  Superoperator s;
  s.dim_ = dim;
  s.apply_ = std::move(fn);
  return s;
}

Matrix Superoperator::apply(const Matrix& rho) const { return apply_(rho); }

const Matrix& Superoperator::matrix() const {
  if (!matrix_rep_) {
    const int d = dim_;
    Matrix rep(d * d, d * d);
    Matrix basis = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        basis(i, j) = 1.0;
        rep.col(j * d + i) = vec(apply_(basis));
        basis(i, j) = 0.0;
      }
    }
    matrix_rep_ = std::move(rep);
  }
  return *matrix_rep_;
}

Matrix propagate(const Superoperator& generator, const Matrix& rho, double dt) {
  require_square(rho, "propagate");
  if (rho.rows() != generator.dim()) throw ArgumentError("propagate: dimension mismatch");
  if (!(dt >= 0.0)) throw ArgumentError("propagate: dt must be >= 0");
  if (dt == 0.0) return rho;
  Matrix out;
  if (generator.has_effective_hamiltonian()) {
    const Matrix e = expm(Matrix(-kI * dt * generator.effective_hamiltonian()));
    out = e * rho * e.adjoint();
  } else {
    const Matrix e = expm(Matrix(dt * generator.matrix()));
    out = unvec(e * vec(rho), generator.dim());
  }
  if (!all_finite(out)) throw NumericError("propagate: overflow");
  // Hermitian input stays Hermitian; symmetrize to suppress roundoff drift.
  if (hermiticity_defect(rho) <= 1e-8 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
    out = hermitize(out);
  }
  return out;
}

}  // namespace qjt::qops
