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

#include <optional>

#include "qops.hpp"

namespace qjt::nonh {

/// Split of an effective non-Hermitian Hamiltonian into the Hermitian part
/// H = (h + h^dag)/2 and the decay operator R = c*1 + i(h - h^dag) >= 0.
struct EffectiveHamiltonian {
  Matrix h_eff;
  double c = 0.0;
  Matrix hermitian_part;
  Matrix rate_operator;
};

/// c_explicit empty selects c automatically so that min eig(R) = 0.
EffectiveHamiltonian decompose(const Matrix& h_eff, std::optional<double> c_explicit,
                               const Tolerances& tol = default_tolerances());

/// Full scalar parametrization of a 2x2 effective Hamiltonian
/// h = ((eps1+eps0)/2) 1 + K with traceless K = (alpha, beta; delta, -alpha).
struct C2Params {
  Complex eps1, eps0, beta, delta;
  double c = 0.0;

  Complex alpha;    // (eps1 - eps0)/2
  Complex kappa;    // alpha^2 + beta*delta, with K^2 = kappa 1
  double k = 0.0;   // sqrt(|beta - conj(delta)|^2 + 4 Im(alpha)^2)
  double c_tilde = 0.0;  // c - Im(eps1 + eps0); positivity iff c_tilde >= k
  double chi = 0.0;      // principal argument of kappa
  Complex z;             // e^{i chi/2} sqrt|kappa|
  Matrix K;
  double scale = 0.0;  // max(|alpha|, |beta|, |delta|)
};

C2Params c2_parametrize(const Matrix& h_eff, double c);
C2Params c2_from_entries(Complex eps1, Complex eps0, Complex beta, Complex delta,
                         double c);

enum class Regime { unitary, uniform, exceptional, generic };
Regime classify(const C2Params& params);
const char* regime_name(Regime regime);

/// At the exceptional point K = lambda0 |phi0><phi1| with orthonormal
/// phi0 (kernel vector) and phi1, lambda0 = |beta| + |delta|.
struct EpBasis {
  Vector phi0, phi1;
  double lambda0 = 0.0;
};

EpBasis ep_basis(const C2Params& params);

/// exp(-i K t): g+- closed forms away from the exceptional point, the
/// truncated entire series within |kappa| <= ep_switch * scale^2. Continuous
/// across the switch.
Matrix propagator_K(const C2Params& params, double t);

/// Entire-series coefficients of exp(-i K t) = g+(kappa t^2) 1 - g-(kappa t^2) iKt.
Complex g_plus(Complex xi);
Complex g_minus(Complex xi);
Complex g_plus_series(Complex xi);
Complex g_minus_series(Complex xi);

struct Eigensystem {
  Complex z;
  Vector u_plus, u_minus;    // normalized right eigenvectors, K u = +-z u
  Matrix V_plus, V_minus;    // spectral idempotents 1/2 +- K/(2z)
};

/// Out-of-EP eigensystem; beta*delta = 0 uses z = alpha.
Eigensystem eigensystem(const C2Params& params);

/// Survival probability e^{-c_tilde t} tr{e^{-iKt} rho0 e^{iK^dag t}}.
double survival(const C2Params& params, const qops::DensityOperator& rho0, double t);

/// Waiting-time density -dS/dt, evaluated analytically:
/// e^{-c_tilde t} ( c_tilde tr(zeta) + i tr{(K - K^dag) zeta} ).
double waiting_density_nh(const C2Params& params, const qops::DensityOperator& rho0,
                          double t);

struct WaitingMoments {
  double mean = 0.0;
  double variance = 0.0;
  double total_probability = 0.0;  // integral of the density; 1 - tail
  double tail = 0.0;               // P[T = +infinity]
};

/// Adaptive quadrature of the waiting density on [0, T*] with S(T*) < 1e-10
/// plus an exponential tail correction. Infinite moments when the survival
/// probability has a positive limit.
WaitingMoments waiting_moments(const C2Params& params, const qops::DensityOperator& rho0);

/// Jump model with G[rho] = R^{1/2} rho R^{1/2} behind the given reference
/// rate nu, so the engine can sample jumps for this effective Hamiltonian.
qops::JumpModel to_jump_model(const EffectiveHamiltonian& eff, double nu = 1.0);

}  // namespace qjt::nonh
