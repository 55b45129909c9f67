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

#include "qops.hpp"

// Closed-form reference results for the analytically solvable models. This
// is a deliberately separate layer: production code never calls it; the
// verification suite and the tests compare the generic numerical paths
// against these formulas.
namespace qjt::reference {

// Quarter series sums_m x^{4m+r}/(4m+r)! via cosh/cos combinations.
double quarter_sum(double x, int residue);

// --- Exponential-law revival model -----------------------------------------

Matrix revival_mean_state_exp(const Matrix& rho0, double lambda, double t0);
// P[first jump after t0 has type i], horizon t, initial state rho0.
double revival_prob_exp(int i, const Matrix& rho0, double lambda, double t0, double t);
double revival_total_exp(double lambda, double t0, double t);  // P[N(t)-N(t0) >= 1]
double kolmogorov_exp(double lambda, double t0, double t);
double trace_distance_exp(double lambda, double t0);

// --- Erlang-2 revival model -------------------------------------------------

Matrix revival_mean_state_erlang(const Matrix& rho0, double lambda, double t0);
double revival_prob_erlang(int i, const Matrix& rho0, double lambda, double t0,
                           double t);
double revival_total_erlang(double lambda, double t0, double t);
double kolmogorov_erlang(double lambda, double t0, double t);
double trace_distance_erlang(double lambda, double t0);

// --- Two-level walk ----------------------------------------------------------

// sigma_z case: survival depends only on the population of the level that
// the vertex channel drains (P_k at vertex x(k)).
double walk_survival_sigma_z(double active_population, double nu_k, double dt);

// sigma_x case, |omega| > nu/2, started in the excited state at x(1):
// spinor after lag s, its norm^2, survival, and waiting density.
Vector walk_spinor_sigma_x(double omega1, double nu1, double s);
double walk_survival_sigma_x(double omega1, double nu1, double s);
double walk_density_sigma_x(double omega1, double nu1, double s);

// --- Oscillating waiting density ---------------------------------------------

// The tight-positivity real-eigenvalue example at phi = pi/4:
// p_T(t) = e^{-sqrt2 s t} s (sqrt2 - sin(sqrt2 s t) + cos(sqrt2 s t)).
double oscillating_density(double s, double t);
// n-th zero: sqrt2 s t = 2 n pi + 3 pi / 4.
double oscillating_zero(double s, int n);

}  // namespace qjt::reference
