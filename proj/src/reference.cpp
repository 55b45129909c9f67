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

#include "reference.hpp"

#include <cmath>

namespace qjt::reference {

double quarter_sum(double x, int residue) {
  switch (residue & 3) {
    case 0: return 0.5 * (std::cosh(x) + std::cos(x));
    case 1: return 0.5 * (std::sinh(x) + std::sin(x));
    case 2: return 0.5 * (std::cosh(x) - std::cos(x));
    default: return 0.5 * (std::sinh(x) - std::sin(x));
  }
}

namespace {

Matrix mix_diagonals(const Matrix& rho0, double offdiag, double keep, double swap) {
  Matrix out = Matrix::Zero(2, 2);
  out(0, 1) = offdiag * rho0(0, 1);
  out(1, 0) = offdiag * rho0(1, 0);
  out(0, 0) = keep * rho0(0, 0) + swap * rho0(1, 1);
  out(1, 1) = keep * rho0(1, 1) + swap * rho0(0, 0);
  return out;
}

double pop(const Matrix& rho0, int i) {
  // Basis order is (|1>, |0>): rho_11 is entry (0,0), rho_00 entry (1,1).
  return i == 1 ? rho0(0, 0).real() : rho0(1, 1).real();
}

}  // namespace

Matrix revival_mean_state_exp(const Matrix& rho0, double lambda, double t0) {
  const double e1 = std::exp(-lambda * t0);
  const double e2 = std::exp(-2.0 * lambda * t0);
  return mix_diagonals(rho0, e1, 0.5 * (1.0 + e2), 0.5 * (1.0 - e2));
}

double revival_prob_exp(int i, const Matrix& rho0, double lambda, double t0,
                        double t) {
  const double rii = pop(rho0, i);
  const double e2 = std::exp(-2.0 * lambda * t0);
  return (1.0 - std::exp(-lambda * (t - t0))) * 0.5 *
         ((1.0 + e2) * rii + (1.0 - e2) * (1.0 - rii));
}

double revival_total_exp(double lambda, double t0, double t) {
  return 1.0 - std::exp(-lambda * (t - t0));
}

double kolmogorov_exp(double lambda, double t0, double t) {
  return (1.0 - std::exp(-lambda * (t - t0))) * std::exp(-2.0 * lambda * t0);
}

double trace_distance_exp(double lambda, double t0) {
  return std::exp(-2.0 * lambda * t0);
}

Matrix revival_mean_state_erlang(const Matrix& rho0, double lambda, double t0) {
  const double x = lambda * t0;
  const double offdiag = (1.0 + x) * std::exp(-x);
  const double osc = std::exp(-x) * (std::cos(x) + std::sin(x));
  return mix_diagonals(rho0, offdiag, 0.5 * (1.0 + osc), 0.5 * (1.0 - osc));
}

double revival_prob_erlang(int i, const Matrix& rho0, double lambda, double t0,
                           double t) {
  const double rii = pop(rho0, i);
  const double x0 = lambda * t0;
  const double dx = lambda * (t - t0);
  const double bias = 2.0 * rii - 1.0;
  return 0.5 * (1.0 - std::exp(-dx)) *
             (1.0 + std::exp(-x0) * (std::cos(x0) + std::sin(x0)) * bias) -
         0.5 * dx * std::exp(-lambda * t) * (std::cosh(x0) + bias * std::cos(x0));
}

double revival_total_erlang(double lambda, double t0, double t) {
  const double dx = lambda * (t - t0);
  return 1.0 - std::exp(-dx) -
         0.5 * dx * std::exp(-dx) * (1.0 + std::exp(-2.0 * lambda * t0));
}

double kolmogorov_erlang(double lambda, double t0, double t) {
  const double x0 = lambda * t0;
  const double dx = lambda * (t - t0);
  return std::abs((1.0 - std::exp(-dx)) * std::exp(-x0) *
                      (std::cos(x0) + std::sin(x0)) -
                  dx * std::exp(-lambda * t) * std::cos(x0));
}

double trace_distance_erlang(double lambda, double t0) {
  const double x0 = lambda * t0;
  return std::exp(-x0) * std::abs(std::cos(x0) + std::sin(x0));
}

double walk_survival_sigma_z(double active_population, double nu_k, double dt) {
  return active_population * std::exp(-nu_k * dt) + (1.0 - active_population);
}

Vector walk_spinor_sigma_x(double omega1, double nu1, double s) {
  const double z1 = 0.5 * std::sqrt(omega1 * omega1 - 0.25 * nu1 * nu1);
  Vector psi(2);
  psi(0) = std::cos(z1 * s) - nu1 / (4.0 * z1) * std::sin(z1 * s);
  psi(1) = Complex(0.0, -omega1 / (2.0 * z1) * std::sin(z1 * s));
  return psi;
}

double walk_survival_sigma_x(double omega1, double nu1, double s) {
  return std::exp(-0.5 * nu1 * s) * walk_spinor_sigma_x(omega1, nu1, s).squaredNorm();
}

double walk_density_sigma_x(double omega1, double nu1, double s) {
  const Vector psi = walk_spinor_sigma_x(omega1, nu1, s);
  return nu1 * std::exp(-0.5 * nu1 * s) * std::norm(psi(0));
}

double oscillating_density(double s, double t) {
  const double x = std::sqrt(2.0) * s * t;
  return std::exp(-x) * s * (std::sqrt(2.0) - std::sin(x) + std::cos(x));
}

double oscillating_zero(double s, int n) {
  return (2.0 * n * M_PI + 0.75 * M_PI) / (std::sqrt(2.0) * s);
}

}  // namespace qjt::reference
