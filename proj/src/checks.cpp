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

#include "checks.hpp"

#include <cmath>
#include <random>

#include "engine.hpp"
#include "nonhermitian.hpp"
#include "reference.hpp"
#include "renewal.hpp"
#include "walk.hpp"

namespace qjt::checks {

namespace {

using qops::DensityOperator;

struct Recorder {
  std::vector<CheckRow> rows;
  void add(std::string id, std::string anchor, double expected, double actual,
           double tol) {
    CheckRow row;
    row.check_id = std::move(id);
    row.anchor = std::move(anchor);
    row.expected = expected;
    row.actual = actual;
    row.tolerance = tol;
    row.pass = std::isfinite(actual) && std::abs(actual - expected) <= tol;
    rows.push_back(std::move(row));
  }
};

Matrix reference_qubit() {
  Matrix rho(2, 2);
  rho << 0.62, Complex(0.21, -0.13), Complex(0.21, 0.13), 0.38;
  return rho;
}

void check_channel_table(Recorder& rec) {
  const Matrix rho = reference_qubit();
  const auto e0 = qops::QuantumChannel::create({qops::sigma_plus()});
  const auto e1 = qops::QuantumChannel::create({qops::sigma_minus()});
  const auto epm = qops::QuantumChannel::create({qops::sigma_plus(), qops::sigma_minus()});
  Matrix t0 = Matrix::Zero(2, 2), t1 = Matrix::Zero(2, 2), tpm = Matrix::Zero(2, 2);
  t0(0, 0) = rho(1, 1);
  t1(1, 1) = rho(0, 0);
  tpm(0, 0) = rho(1, 1);
  tpm(1, 1) = rho(0, 0);
  rec.add("channel-raise", "reset channel action table", 0.0,
          (qops::apply_channel(e0, rho) - t0).cwiseAbs().maxCoeff(), 1e-14);
  rec.add("channel-lower", "reset channel action table", 0.0,
          (qops::apply_channel(e1, rho) - t1).cwiseAbs().maxCoeff(), 1e-14);
  rec.add("channel-dephase", "reset channel action table", 0.0,
          (qops::apply_channel(epm, rho) - tpm).cwiseAbs().maxCoeff(), 1e-14);
}

nonh::C2Params ep_instance() {
  const Complex beta(0.5, 0.3), delta(-0.2, 0.6);
  const Complex alpha = kI * std::sqrt(beta * delta);
  const double lambda0 = std::abs(beta) + std::abs(delta);
  return nonh::c2_from_entries(alpha, -alpha, beta, delta, lambda0);
}

void check_ep_moments(Recorder& rec) {
  const auto params = ep_instance();
  const auto basis = nonh::ep_basis(params);
  const double l0 = basis.lambda0;
  const struct {
    const char* tag;
    Vector psi;
    double mean, var;
  } cases[] = {
      {"phi0", basis.phi0, 1.0, 1.0},
      {"mix-minus", Vector((basis.phi0 - kI * basis.phi1) / std::sqrt(2.0)), 1.0, 3.0},
      {"mix-plus", Vector((basis.phi0 + kI * basis.phi1) / std::sqrt(2.0)), 3.0, 3.0},
      {"phi1", basis.phi1, 3.0, 5.0},
  };
  for (const auto& c : cases) {
    const auto m = nonh::waiting_moments(params, qops::pure_state(c.psi));
    rec.add(std::string("ep-mean-") + c.tag, "exceptional-point waiting moments",
            c.mean, m.mean * l0, 1e-6);
    rec.add(std::string("ep-var-") + c.tag, "exceptional-point waiting moments",
            c.var, m.variance * l0 * l0, 1e-6);
  }
  // Basis sanity: phi0 in the kernel, phi1 mapped onto lambda0 phi0.
  rec.add("ep-kernel", "exceptional-point basis", 0.0, (params.K * basis.phi0).norm(),
          1e-12);
  rec.add("ep-image", "exceptional-point basis", 0.0,
          (params.K * basis.phi1 - basis.lambda0 * basis.phi0).norm(), 1e-10);
  // Linear-in-t propagator.
  double dev = 0.0;
  for (double t : {0.5, 2.0, 7.0}) {
    const Matrix direct = nonh::propagator_K(params, t);
    const Matrix linear = Matrix::Identity(2, 2) - kI * t * params.K;
    dev = std::max(dev, (direct - linear).cwiseAbs().maxCoeff());
  }
  rec.add("ep-linear-propagator", "nilpotent propagator is linear in t", 0.0, dev,
          1e-10);
}

void check_oscillating_density(Recorder& rec) {
  const double s = 1.0;
  Matrix k(2, 2);
  k << Complex(0, s * std::sin(M_PI / 4)), s, s, Complex(0, -s * std::sin(M_PI / 4));
  const auto params = nonh::c2_parametrize(k, 2.0 * s * std::sin(M_PI / 4));
  const auto eig = nonh::eigensystem(params);
  const Vector psi =
      Complex(0.5, 0.5) * eig.u_plus + Complex(0.0, 1.0 / std::sqrt(2.0)) * eig.u_minus;
  const auto rho = qops::pure_state(psi);
  double dev = 0.0;
  for (double t = 0.0; t <= 10.0; t += 0.02) {
    dev = std::max(dev, std::abs(nonh::waiting_density_nh(params, rho, t) -
                                 reference::oscillating_density(s, t)));
  }
  rec.add("oscillating-density", "tight-positivity oscillating waiting density", 0.0,
          dev, 1e-9);

  // Zeros located by parabolic refinement of the computed density.
  for (int n = 0; n < 4; ++n) {
    const double guess = reference::oscillating_zero(s, n);
    double center = guess;
    for (const double h : {1e-3, 1e-5}) {
      const double fm = nonh::waiting_density_nh(params, rho, center - h);
      const double f0 = nonh::waiting_density_nh(params, rho, center);
      const double fp = nonh::waiting_density_nh(params, rho, center + h);
      const double denom = fm - 2.0 * f0 + fp;
      if (denom > 0.0) center += 0.5 * h * (fm - fp) / denom;
    }
    rec.add("oscillating-zero-" + std::to_string(n),
            "zeros of the oscillating waiting density", guess, center, 1e-8);
  }
}

void check_eigensystem_example(Recorder& rec) {
  Matrix k(2, 2);
  k << Complex(0, std::sin(M_PI / 4)), 1.0, 1.0, Complex(0, -std::sin(M_PI / 4));
  const auto params = nonh::c2_parametrize(k, 5.0);
  const auto eig = nonh::eigensystem(params);
  rec.add("eigen-overlap", "reference eigenvector overlap (1+i)/2", 0.0,
          std::abs(eig.u_plus.dot(eig.u_minus) - Complex(0.5, 0.5)), 1e-12);
  rec.add("eigen-z", "reference eigenvalue |s cos phi|", 1.0 / std::sqrt(2.0),
          eig.z.real(), 1e-12);
}

void check_family_bound(Recorder& rec) {
  const double g1 = 0.9, g0 = 0.2, theta = 1.3;
  const Complex beta(0.7, 0.4);
  const auto params = nonh::c2_from_entries(
      Complex(1.0, -g1), Complex(0.4, -g0), beta, std::conj(beta) * std::exp(kI * theta),
      3.0);
  const double expected = std::sqrt(
      4.0 * std::norm(beta) * std::pow(std::sin(0.5 * theta), 2) + (g1 - g0) * (g1 - g0));
  rec.add("family-k", "positivity bound of the gain/loss family", expected, params.k,
          1e-12);
}

void check_propagator_routes(Recorder& rec) {
  std::mt19937_64 gen(202608);
  std::normal_distribution<double> normal(0.0, 0.5);
  double dev = 0.0;
  int used = 0;
  while (used < 30) {
    Matrix k(2, 2);
    const Complex alpha(normal(gen), normal(gen));
    k << alpha, Complex(normal(gen), normal(gen)), Complex(normal(gen), normal(gen)),
        -alpha;
    const auto params = nonh::c2_parametrize(k, 10.0);
    if (nonh::classify(params) != nonh::Regime::generic) continue;
    ++used;
    const auto eig = nonh::eigensystem(params);
    for (double t : {0.7, 3.0, 10.0}) {
      const Matrix via_v = std::exp(-kI * eig.z * t) * eig.V_plus +
                           std::exp(kI * eig.z * t) * eig.V_minus;
      const Matrix via_g = nonh::propagator_K(params, t);
      dev = std::max(dev, (via_v - via_g).cwiseAbs().maxCoeff() /
                              std::max(1.0, via_g.cwiseAbs().maxCoeff()));
    }
  }
  rec.add("propagator-dual-route", "series route vs eigen route", 0.0, dev, 1e-10);

  const Complex beta(0.8, 0.1), delta(0.4, -0.3);
  const Complex alpha = kI * std::sqrt(beta * delta * (1.0 - 1e-9));
  const auto params = nonh::c2_from_entries(alpha, -alpha, beta, delta, 5.0);
  const auto eig = nonh::eigensystem(params);
  double cont = 0.0;
  for (double t : {0.5, 2.0, 8.0}) {
    const Matrix via_v = std::exp(-kI * eig.z * t) * eig.V_plus +
                         std::exp(kI * eig.z * t) * eig.V_minus;
    cont = std::max(cont,
                    (nonh::propagator_K(params, t) - via_v).cwiseAbs().maxCoeff());
  }
  rec.add("ep-switch-continuity", "no singularity across the series switch", 0.0, cont,
          1e-6);

  double gdev = 0.0;
  for (double r : {0.5, 20.0, 100.0}) {
    for (int a = 0; a < 8; ++a) {
      const Complex xi = std::polar(r, a * 0.7853981633974483);
      gdev = std::max(gdev, std::abs(nonh::g_plus(xi) - nonh::g_plus_series(xi)) /
                                std::max(1.0, std::abs(nonh::g_plus(xi))));
      gdev = std::max(gdev, std::abs(nonh::g_minus(xi) - nonh::g_minus_series(xi)) /
                                std::max(1.0, std::abs(nonh::g_minus(xi))));
    }
  }
  rec.add("g-series-closed", "entire series vs exponential form", 0.0, gdev, 1e-12);
}

void check_exponential_revival(Recorder& rec) {
  const double lambda = 1.0;
  const auto model = renewal::RevivalModel::create(pointproc::RenewalLaw::exponential(lambda));
  const auto rho0 = DensityOperator::create(reference_qubit());
  double eta_dev = 0.0, pi_dev = 0.0, dk_dev = 0.0, fact_dev = 0.0;
  for (double t0 : {0.5, 1.5}) {
    const Matrix eta = renewal::mean_state_interspersed(model.model, rho0, t0).mat;
    eta_dev = std::max(
        eta_dev,
        (eta - reference::revival_mean_state_exp(rho0.mat, lambda, t0)).cwiseAbs().maxCoeff());
    for (double dt : {0.5, 1.5}) {
      const double t = t0 + dt;
      const auto [p0, p1] = renewal::revival_probabilities(model, rho0, t0, t);
      pi_dev = std::max(pi_dev, std::abs(p0 - reference::revival_prob_exp(
                                                  0, rho0.mat, lambda, t0, t)));
      pi_dev = std::max(pi_dev, std::abs(p1 - reference::revival_prob_exp(
                                                  1, rho0.mat, lambda, t0, t)));
      const auto d = renewal::distances(model, t0, t);
      dk_dev = std::max(dk_dev,
                        std::abs(d.kolmogorov - reference::kolmogorov_exp(lambda, t0, t)));
      fact_dev = std::max(
          fact_dev, std::abs(d.kolmogorov -
                             reference::revival_total_exp(lambda, t0, t) * d.trace));
    }
  }
  rec.add("exp-revival-eta", "exponential revival mean state", 0.0, eta_dev, 1e-8);
  rec.add("exp-revival-pi", "exponential first-jump probabilities", 0.0, pi_dev, 1e-8);
  rec.add("exp-revival-dk", "exponential Kolmogorov distance", 0.0, dk_dev, 1e-8);
  rec.add("exp-revival-factorization", "memoryless distance factorization", 0.0,
          fact_dev, 1e-8);
}

void check_erlang_revival(Recorder& rec) {
  const double lambda = 1.0;
  const auto model = renewal::RevivalModel::create(pointproc::RenewalLaw::erlang2(lambda));
  const auto rho0 = DensityOperator::create(reference_qubit());
  double eta_dev = 0.0, pi_dev = 0.0, dk_dev = 0.0, tr_dev = 0.0;
  for (double t0 : {0.5, 1.5}) {
    const Matrix eta = renewal::mean_state_interspersed(model.model, rho0, t0).mat;
    eta_dev = std::max(eta_dev,
                       (eta - reference::revival_mean_state_erlang(rho0.mat, lambda, t0))
                           .cwiseAbs()
                           .maxCoeff());
    for (double dt : {0.5, 1.5}) {
      const double t = t0 + dt;
      const auto [p0, p1] = renewal::revival_probabilities(model, rho0, t0, t);
      pi_dev = std::max(pi_dev, std::abs(p0 - reference::revival_prob_erlang(
                                                  0, rho0.mat, lambda, t0, t)));
      pi_dev = std::max(pi_dev, std::abs(p1 - reference::revival_prob_erlang(
                                                  1, rho0.mat, lambda, t0, t)));
      const auto d = renewal::distances(model, t0, t);
      dk_dev = std::max(
          dk_dev, std::abs(d.kolmogorov - reference::kolmogorov_erlang(lambda, t0, t)));
      tr_dev = std::max(
          tr_dev, std::abs(d.trace - reference::trace_distance_erlang(lambda, t0)));
    }
  }
  rec.add("erlang-revival-eta", "Erlang revival mean state", 0.0, eta_dev, 1e-8);
  rec.add("erlang-revival-pi", "Erlang first-jump probabilities", 0.0, pi_dev, 1e-8);
  rec.add("erlang-revival-dk", "Erlang Kolmogorov distance", 0.0, dk_dev, 1e-8);
  rec.add("erlang-revival-trace", "Erlang trace distance", 0.0, tr_dev, 1e-8);

  // Revival witness: interior minimum of the long-time Kolmogorov distance.
  double best = 1e300;
  double best_t0 = 0.0;
  for (double t0 = 2.0; t0 <= 2.75001; t0 += 0.05) {
    const double dk = renewal::distances(model, t0, t0 + 40.0, 30, 96).kolmogorov;
    if (dk < best) {
      best = dk;
      best_t0 = t0;
    }
  }
  rec.add("erlang-revival-witness", "distance minimum near 3 pi / 4", 0.75 * M_PI,
          best_t0, 0.06);
}

void check_two_level_walk(Recorder& rec) {
  const double nu0 = 0.6, nu1 = 1.1;
  const auto model_a = walk::two_level_example(walk::TwoLevelCase::sigma_z, 0.4, 0.9,
                                               nu0, nu1);
  const auto rho = DensityOperator::create(reference_qubit());
  double dev_a = 0.0;
  for (double dt : {0.3, 1.2, 4.0}) {
    dev_a = std::max(dev_a, std::abs(walk::vertex_waiting(model_a, {1, rho}, dt) -
                                     reference::walk_survival_sigma_z(
                                         rho.mat(0, 0).real(), nu1, dt)));
    dev_a = std::max(dev_a, std::abs(walk::vertex_waiting(model_a, {0, rho}, dt) -
                                     reference::walk_survival_sigma_z(
                                         rho.mat(1, 1).real(), nu0, dt)));
  }
  rec.add("walk-survival-commuting", "population-only survival", 0.0, dev_a, 1e-10);

  const double omega1 = 1.0, nu1b = 0.7;
  const auto model_b =
      walk::two_level_example(walk::TwoLevelCase::sigma_x, 0.5, omega1, 0.6, nu1b);
  const auto excited = DensityOperator::create(qops::projector_excited());
  double dev_b = 0.0;
  for (double dt : {0.4, 1.3, 3.1, 6.0}) {
    dev_b = std::max(dev_b, std::abs(walk::vertex_waiting(model_b, {1, excited}, dt) -
                                     reference::walk_survival_sigma_x(omega1, nu1b, dt)));
  }
  rec.add("walk-survival-oscillating", "spinor-norm survival", 0.0, dev_b, 1e-9);

  // Stationarity of (x(0), P1) in the commuting case.
  walk::RateVector init;
  init.etas = {Matrix(qops::projector_excited()), Matrix::Zero(2, 2)};
  const auto evolved = walk::lindblad_rate_evolve(model_a, init, 4.2);
  const double drift = (evolved.etas[0] - init.etas[0]).cwiseAbs().maxCoeff() +
                       evolved.etas[1].cwiseAbs().maxCoeff();
  rec.add("walk-stationary-state", "frozen hybrid configuration", 0.0, drift, 1e-10);

  const auto t_rates = pauli_rates(model_a);
  rec.add("walk-pauli-rates", "two-vertex transition rates", 1.0,
          t_rates(0, 1) * t_rates(1, 0), 1e-12);
}

void check_count_normalization(Recorder& rec) {
  const auto identity_model = qops::JumpModel::create(
      Matrix::Zero(2, 2), {},
      {{"tick", 1.0, qops::QuantumChannel::create({Matrix::Identity(2, 2)})}});
  const auto rho0 = DensityOperator::create(reference_qubit());
  const auto dist = engine::count_distribution(identity_model, rho0, 1.0, 20);
  double poisson_dev = 0.0;
  double lgamma_acc = 0.0;
  for (int m = 0; m <= 20; ++m) {
    if (m > 0) lgamma_acc += std::log(static_cast<double>(m));
    const double pmf = std::exp(-1.0 - lgamma_acc);
    poisson_dev = std::max(poisson_dev, std::abs(dist.probabilities[m] - pmf));
  }
  rec.add("counts-poisson", "identity channel gives Poisson counts", 0.0, poisson_dev,
          1e-6);
  double total = dist.remainder;
  for (const double p : dist.probabilities) total += p;
  rec.add("counts-normalization", "count probabilities sum to one", 1.0, total, 1e-6);
}

void check_exponential_factorization(Recorder& rec) {
  const double lambda = 1.0, t0 = 1.0, t = 2.0;
  const auto model = renewal::RevivalModel::create(pointproc::RenewalLaw::exponential(lambda));
  const auto rho0 = DensityOperator::create(reference_qubit());
  const double direct = renewal::event_probability(model.model, rho0, {"0"}, t0, t);
  const Matrix eta0 = renewal::mean_state_interspersed(model.model, rho0, t0).mat;
  const auto law = pointproc::RenewalLaw::exponential(lambda);
  const int n = 4000;
  double surrogate = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = t0 + (t - t0) * i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    surrogate += w * law.survival(t - s) * law.pdf(s - t0) * eta0(1, 1).real();
  }
  surrogate *= (t - t0) / n;
  rec.add("exp-instrument-factorization", "one-jump instrument through the mean state",
          surrogate, direct, 1e-6);
}

}  // namespace

std::vector<CheckRow> run_verification() {
  Recorder rec;
  check_channel_table(rec);
  check_ep_moments(rec);
  check_oscillating_density(rec);
  check_eigensystem_example(rec);
  check_family_bound(rec);
  check_propagator_routes(rec);
  check_exponential_revival(rec);
  check_erlang_revival(rec);
  check_two_level_walk(rec);
  check_count_normalization(rec);
  check_exponential_factorization(rec);
  return rec.rows;
}

bool all_passed(const std::vector<CheckRow>& rows) {
  for (const auto& row : rows) {
    if (!row.pass) return false;
  }
  return true;
}

tables::Table to_table(const std::vector<CheckRow>& rows) {
  tables::Table table;
  table.name = "verify_report";
  table.columns = {"check_id", "paper_anchor", "expected", "actual", "tolerance",
                   "status"};
  for (const auto& row : rows) {
    table.add_row({row.check_id, row.anchor, tables::format_double(row.expected),
                   tables::format_double(row.actual),
                   tables::format_double(row.tolerance), row.pass ? "pass" : "fail"});
  }
  return table;
}

}  // namespace qjt::checks
