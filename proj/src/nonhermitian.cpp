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

#include "nonhermitian.hpp"

#include <cmath>

#include "ode.hpp"
#include "pointproc.hpp"

namespace qjt::nonh {

using qops::DensityOperator;

EffectiveHamiltonian decompose(const Matrix& h_eff, std::optional<double> c_explicit,
                               const Tolerances& tol) {
  if (h_eff.rows() != h_eff.cols() || h_eff.rows() < 1) {
    throw ArgumentError("decompose: h_eff must be square");
  }
  if (!qops::all_finite(h_eff)) throw ModelError("decompose: non-finite entries");

  const Matrix w = qops::hermitize(Matrix(kI * (h_eff - h_eff.adjoint())));
  const double w_min = qops::min_eigenvalue(w);

  EffectiveHamiltonian out;
  out.h_eff = h_eff;
  out.hermitian_part = qops::hermitize(Matrix(0.5 * (h_eff + h_eff.adjoint())));
  if (c_explicit) {
    out.c = *c_explicit;
    if (w_min + out.c < -tol.positivity) {
      std::string msg = "decompose: explicit c = " + std::to_string(out.c) +
                        " violates R >= 0 (needs c >= " + std::to_string(-w_min) + ")";
      if (h_eff.rows() == 2) {
        const C2Params p = c2_parametrize(h_eff, out.c);
        msg += "; in dim 2 this is the bound c_tilde >= k with k = " +
               std::to_string(p.k);
      }
      throw ModelError(msg);
    }
  } else {
    out.c = -w_min;
  }
  out.rate_operator =
      qops::hermitize(Matrix(out.c * Matrix::Identity(h_eff.rows(), h_eff.cols()) + w));
  return out;
}

C2Params c2_parametrize(const Matrix& h_eff, double c) {
  if (h_eff.rows() != 2 || h_eff.cols() != 2) {
    throw ArgumentError("c2_parametrize: h_eff must be 2x2");
  }
  return c2_from_entries(h_eff(0, 0), h_eff(1, 1), h_eff(0, 1), h_eff(1, 0), c);
}

C2Params c2_from_entries(Complex eps1, Complex eps0, Complex beta, Complex delta,
                         double c) {
  C2Params p;
  p.eps1 = eps1;
  p.eps0 = eps0;
  p.beta = beta;
  p.delta = delta;
  p.c = c;
  p.alpha = 0.5 * (eps1 - eps0);
  p.kappa = p.alpha * p.alpha + beta * delta;
  const double im_a = p.alpha.imag();
  p.k = std::sqrt(std::norm(beta - std::conj(delta)) + 4.0 * im_a * im_a);
  p.c_tilde = c - (eps1 + eps0).imag();
  p.chi = std::arg(p.kappa);
  p.z = std::polar(std::sqrt(std::abs(p.kappa)), 0.5 * p.chi);
  p.K = Matrix(2, 2);
  p.K << p.alpha, beta, delta, -p.alpha;
  p.scale = std::max({std::abs(p.alpha), std::abs(beta), std::abs(delta)});

  const Matrix k2 = p.K * p.K;
  const Matrix resid = k2 - p.kappa * Matrix::Identity(2, 2);
  if (resid.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, p.scale * p.scale)) {
    throw NumericError("c2_parametrize: K^2 deviates from kappa*1");
  }
  return p;
}

Regime classify(const C2Params& p) {
  const double s = std::max(p.scale, 1e-300);
  const double k_tol = 1e-10 * std::max(s, 1.0);
  const double kappa_tol = 1e-10 * s * s;
  if (p.k <= k_tol) {
    return std::abs(p.c_tilde) <= k_tol ? Regime::unitary : Regime::uniform;
  }
  if (std::abs(p.kappa) <= kappa_tol) return Regime::exceptional;
  return Regime::generic;
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::unitary: return "unitary";
    case Regime::uniform: return "uniform";
    case Regime::exceptional: return "exceptional";
    case Regime::generic: return "generic";
  }
  return "?";
}

EpBasis ep_basis(const C2Params& p) {
  if (classify(p) != Regime::exceptional) {
    throw RegimeError("ep_basis: model is not at an exceptional point (regime " +
                      std::string(regime_name(classify(p))) + ")");
  }
  const double ab = std::abs(p.beta), ad = std::abs(p.delta);
  EpBasis out;
  out.lambda0 = ab + ad;
  out.phi0 = Vector(2);
  out.phi1 = Vector(2);
  if (ab == 0.0) {
    out.phi0 << 0.0, std::polar(1.0, std::arg(p.delta));
    out.phi1 << 1.0, 0.0;
  } else if (ad == 0.0) {
    out.phi0 << 1.0, 0.0;
    out.phi1 << 0.0, std::polar(1.0, -std::arg(p.beta));
  } else {
    const double arg_a = std::arg(p.alpha);
    const double norm = std::sqrt(ab + ad);
    out.phi0 << std::sqrt(ab) / norm,
        std::polar(std::sqrt(ad), std::arg(p.delta) - arg_a) / norm;
    out.phi1 << std::polar(std::sqrt(ad), -arg_a) / norm,
        std::polar(std::sqrt(ab), -std::arg(p.beta)) / norm;
  }
  return out;
}

namespace {

std::pair<Complex, Complex> g_series_pair(Complex xi, double term_floor) {
  Complex gp{1.0, 0.0}, gm{1.0, 0.0};
  Complex term_p{1.0, 0.0}, term_m{1.0, 0.0};
  for (int n = 1; n <= 400; ++n) {
    term_p *= -xi / double((2 * n - 1) * (2 * n));
    term_m *= -xi / double((2 * n) * (2 * n + 1));
    gp += term_p;
    gm += term_m;
    if (std::abs(term_p) < term_floor && std::abs(term_m) < term_floor) break;
  }
  return {gp, gm};
}

}  // namespace

Complex g_plus_series(Complex xi) {
  return g_series_pair(xi, default_tolerances().series_term).first;
}

Complex g_minus_series(Complex xi) {
  return g_series_pair(xi, default_tolerances().series_term).second;
}

Complex g_plus(Complex xi) {
  if (std::abs(xi) < 1e-12) return g_plus_series(xi);
  // xi = (zt)^2, izt = sqrt(-xi) up to a sign the even combination ignores.
  const Complex izt = std::sqrt(-xi);
  return 0.5 * (std::exp(izt) + std::exp(-izt));
}

Complex g_minus(Complex xi) {
  if (std::abs(xi) < 1e-12) return g_minus_series(xi);
  const Complex izt = std::sqrt(-xi);
  return 0.5 * (std::exp(izt) - std::exp(-izt)) / izt;
}

Matrix propagator_K(const C2Params& p, double t) {
  if (!(t >= 0.0)) throw ArgumentError("propagator_K: t must be >= 0");
  const Matrix id = Matrix::Identity(2, 2);
  if (t == 0.0) return id;

  Complex gp, gm;
  const double s2 = p.scale * p.scale;
  if (std::abs(p.kappa) <= default_tolerances().ep_switch * s2) {
    const Complex xi = p.kappa * t * t;
    auto [a, b] = g_series_pair(xi, default_tolerances().series_term);
    gp = a;
    gm = b;
  } else {
    const Complex zt = p.z * t;
    if (std::abs(zt) < 1e-6) {
      auto [a, b] = g_series_pair(p.kappa * t * t, default_tolerances().series_term);
      gp = a;
      gm = b;
    } else {
      const Complex eplus = std::exp(kI * zt);
      const Complex eminus = std::exp(-kI * zt);
      gp = 0.5 * (eplus + eminus);
      gm = (eplus - eminus) / (2.0 * kI * zt);
    }
  }
  Matrix out = gp * id - gm * kI * t * p.K;
  if (!qops::all_finite(out)) throw NumericError("propagator_K: overflow");
  return out;
}

Eigensystem eigensystem(const C2Params& p) {
  if (classify(p) != Regime::generic) {
    throw RegimeError("eigensystem: defined out of the exceptional point only (regime " +
                      std::string(regime_name(classify(p))) + ")");
  }
  Eigensystem out;
  const double bd = std::abs(p.beta) * std::abs(p.delta);
  if (bd <= 1e-14 * p.scale * p.scale) {
    // beta*delta = 0 forces alpha != 0; take z = alpha.
    out.z = p.alpha;
    Vector up(2), um(2);
    up << 2.0 * p.alpha, p.delta;
    um << -p.beta, 2.0 * p.alpha;
    out.u_plus = up / up.norm();
    out.u_minus = um / um.norm();
  } else {
    out.z = p.z;
    Vector up(2), um(2);
    up << p.alpha + out.z, p.delta;
    um << p.alpha - out.z, p.delta;
    out.u_plus = up / up.norm();
    out.u_minus = um / um.norm();
  }
  const Matrix id = Matrix::Identity(2, 2);
  out.V_plus = 0.5 * id + p.K / (2.0 * out.z);
  out.V_minus = 0.5 * id - p.K / (2.0 * out.z);
  return out;
}

double survival(const C2Params& p, const DensityOperator& rho0, double t) {
  if (!(t >= 0.0)) throw ArgumentError("survival: t must be >= 0");
  if (rho0.dim() != 2) throw ArgumentError("survival: rho0 must be 2x2");
  if (p.c_tilde < p.k - 1e-10 * std::max(1.0, p.scale)) {
    throw ModelError("survival: positivity violated, c_tilde < k");
  }
  const Matrix e = propagator_K(p, t);
  const Matrix zeta = e * rho0.mat * e.adjoint();
  const double value = std::exp(-p.c_tilde * t) * zeta.trace().real();
  if (!std::isfinite(value)) throw NumericError("survival: overflow");
  return value;
}

double waiting_density_nh(const C2Params& p, const DensityOperator& rho0, double t) {
  if (!(t >= 0.0)) throw ArgumentError("waiting_density_nh: t must be >= 0");
  if (p.c_tilde < p.k - 1e-10 * std::max(1.0, p.scale)) {
    throw ModelError("waiting_density_nh: positivity violated, c_tilde < k");
  }
  const Matrix e = propagator_K(p, t);
  const Matrix zeta = e * rho0.mat * e.adjoint();
  const Complex anti = ((p.K - p.K.adjoint()) * zeta).trace();
  const double value =
      std::exp(-p.c_tilde * t) * (p.c_tilde * zeta.trace().real() + (kI * anti).real());
  if (!std::isfinite(value)) throw NumericError("waiting_density_nh: overflow");
  return value;
}

WaitingMoments waiting_moments(const C2Params& p, const DensityOperator& rho0) {
  const double rate_scale = std::max({p.c_tilde, p.k, std::abs(p.z), 1e-12});
  const double time_scale = 1.0 / rate_scale;

  auto surv = [&](double t) { return survival(p, rho0, t); };
  const double tail = pointproc::estimate_tail(surv, time_scale);

  WaitingMoments out;
  out.tail = tail;
  if (tail > 1e-12) {
    out.mean = pointproc::kInfiniteTime;
    out.variance = pointproc::kInfiniteTime;
    out.total_probability = 1.0 - tail;
    return out;
  }

  double t_star = time_scale;
  while (surv(t_star) >= 1e-10) {
    t_star *= 2.0;
    if (t_star > 1e8 * time_scale) {
      throw NumericError("waiting_moments: survival decays too slowly");
    }
  }

  auto dens = [&](double t) { return waiting_density_nh(p, rho0, t); };
  const double i0 =
      detail::adaptive_simpson(dens, 0.0, t_star, 1e-11);
  const double i1 = detail::adaptive_simpson([&](double t) { return t * dens(t); }, 0.0,
                                             t_star, 1e-11 * t_star);
  const double i2 = detail::adaptive_simpson([&](double t) { return t * t * dens(t); },
                                             0.0, t_star, 1e-11 * t_star * t_star);

  // Exponential tail correction past t_star using the local hazard.
  const double s_star = surv(t_star);
  const double p_star = dens(t_star);
  double c0 = s_star, c1 = s_star * t_star, c2 = s_star * t_star * t_star;
  if (p_star > 0.0 && s_star > 0.0) {
    const double r = p_star / s_star;
    c1 = s_star * (t_star + 1.0 / r);
    c2 = s_star * (t_star * t_star + 2.0 * t_star / r + 2.0 / (r * r));
  }

  out.total_probability = i0 + c0;
  out.mean = i1 + c1;
  out.variance = i2 + c2 - out.mean * out.mean;
  return out;
}

qops::JumpModel to_jump_model(const EffectiveHamiltonian& eff, double nu) {
  if (!(nu > 0.0)) throw ArgumentError("to_jump_model: nu must be > 0");
  // Split G[rho] = R^{1/2} rho R^{1/2} into a trace-nonincreasing channel and
  // a rate: the rate must dominate the operator norm of R.
  const double top = qops::min_eigenvalue(Matrix(-eff.rate_operator)) * -1.0;
  const double rate = std::max(nu, top * (1.0 + 1e-12));
  const Matrix root = qops::sqrt_psd(eff.rate_operator);
  qops::JumpChannel jc;
  jc.label = "jump";
  jc.rate = rate;
  jc.channel = qops::QuantumChannel::create({Matrix(root / std::sqrt(rate))});
  return qops::JumpModel::create(eff.hermitian_part, {}, {std::move(jc)});
}

}  // namespace qjt::nonh
