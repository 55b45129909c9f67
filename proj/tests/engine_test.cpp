#include <doctest.h>

#include <cmath>
#include <random>

#include "engine.hpp"
#include "nonhermitian.hpp"
#include "support/oracles.hpp"

using namespace qjt;
using namespace qjt::qops;
using namespace qjt::engine;
using testsupport::max_abs;

namespace {

JumpModel identity_channel_model(double rate) {
  return JumpModel::create(Matrix::Zero(2, 2), {},
                           {{"tick", rate, QuantumChannel::create({Matrix::Identity(2, 2)})}});
}

// Vertex-local models of the two-level walk, case sigma_z / sigma_x.
JumpModel vertex_model(int vertex, double omega, double nu, const Matrix& axis) {
  const Matrix op = vertex == 1 ? sigma_minus() : sigma_plus();
  return JumpModel::create(Matrix(0.5 * omega * axis), {},
                           {{"hop", nu, QuantumChannel::create({op})}});
}

DensityOperator excited() { return DensityOperator::create(projector_excited()); }
DensityOperator ground() { return DensityOperator::create(projector_ground()); }

}  // namespace

TEST_CASE("jump_update") {
  SUBCASE("raising channel resets any overlapping state to the excited level") {
    std::mt19937_64 gen(3);
    const auto model = vertex_model(0, 0.4, 0.7, pauli_z());
    const auto rho = DensityOperator::create(testsupport::random_density(gen, 2));
    const auto res = jump_update(model, "hop", rho);
    REQUIRE_FALSE(res.forbidden);
    CHECK(max_abs(res.state.mat - projector_excited()) < 1e-12);
    CHECK(res.intensity == doctest::Approx(rho.mat(1, 1).real()).epsilon(1e-12));
  }
  SUBCASE("identity channel leaves the state alone with unit intensity") {
    std::mt19937_64 gen(5);
    const auto model = identity_channel_model(2.0);
    const auto rho = DensityOperator::create(testsupport::random_density(gen, 2));
    const auto res = jump_update(model, "tick", rho);
    CHECK_FALSE(res.forbidden);
    CHECK(res.intensity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(res.state.mat - rho.mat) < 1e-12);
  }
  SUBCASE("forbidden jump flagged, not thrown") {
    const auto model = vertex_model(1, 0.0, 1.0, pauli_z());
    const auto res = jump_update(model, "hop", ground());
    CHECK(res.forbidden);
    CHECK(res.intensity == 0.0);
  }
  SUBCASE("unknown label rejected") {
    const auto model = identity_channel_model(1.0);
    CHECK_THROWS_AS(jump_update(model, "nope", excited()), ArgumentError);
  }
}

TEST_CASE("survival probability") {
  const double nu = 0.8;
  const auto model = vertex_model(1, 0.5, nu, pauli_z());
  SUBCASE("dt = 0 gives 1") {
    CHECK(survival_probability(model, excited(), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("excited state decays exponentially in the sigma_z case") {
    for (double dt : {0.2, 1.0, 3.7}) {
      CHECK(survival_probability(model, excited(), dt) ==
            doctest::Approx(std::exp(-nu * dt)).epsilon(1e-10));
    }
  }
  SUBCASE("ground state never jumps in the sigma_z case") {
    for (double dt : {0.5, 2.0, 20.0}) {
      CHECK(survival_probability(model, ground(), dt) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("monotone nonincreasing in dt") {
    std::mt19937_64 gen(7);
    const auto rho = DensityOperator::create(testsupport::random_density(gen, 2));
    double prev = 1.0;
    for (int i = 1; i <= 40; ++i) {
      const double s = survival_probability(model, rho, 0.1 * i);
      CHECK(s <= prev + 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("waiting density") {
  SUBCASE("uniform rate gives the exponential law") {
    const double nu = 1.3;
    const auto model = identity_channel_model(nu);
    for (double dt : {0.0, 0.4, 2.0}) {
      CHECK(waiting_density(model, excited(), dt) ==
            doctest::Approx(nu * std::exp(-nu * dt)).epsilon(1e-10));
    }
  }
  SUBCASE("density integrates to one against the tail") {
    const auto model = vertex_model(1, 0.9, 0.7, pauli_x());
    const auto rho = excited();
    // Riemann sum of the density plus the survival at the cutoff.
    const int n = 20000;
    const double t_max = 60.0, h = t_max / n;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
      integral += h * waiting_density(model, rho, (i + 0.5) * h);
    }
    CHECK(integral + survival_probability(model, rho, t_max) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("two-level case (b) closed form") {
    const double nu1 = 0.6, omega1 = 1.0;
    const auto model = vertex_model(1, omega1, nu1, pauli_x());
    const double z1 = 0.5 * std::sqrt(omega1 * omega1 - 0.25 * nu1 * nu1);
    for (double s : {0.3, 1.0, 2.4}) {
      const double c = std::cos(z1 * s) - nu1 / (4 * z1) * std::sin(z1 * s);
      const double expected = nu1 * std::exp(-0.5 * nu1 * s) * c * c;
      CHECK(waiting_density(model, excited(), s) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("sampled event counts are Poisson for the identity channel") {
  const double nu = 1.1, horizon = 3.0;
  const auto model = identity_channel_model(nu);
  pointproc::RngStream master(2024, 0);
  const int n_traj = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_traj; ++i) {
    pointproc::RngStream rng(2024, static_cast<std::uint64_t>(i));
    const auto rec = sample_trajectory(model, excited(), horizon, rng);
    REQUIRE_FALSE(rec.aborted);
    const double m = static_cast<double>(rec.trajectory.events.size());
    sum += m;
    sum2 += m * m;
  }
  const double mean = sum / n_traj;
  const double expected = nu * horizon;
  const double stderr_mean = std::sqrt(expected / n_traj);
  CHECK(std::abs(mean - expected) < 3.0 * stderr_mean);
  const double var = sum2 / n_traj - mean * mean;
  CHECK(std::abs(var - expected) < 0.1);
}

TEST_CASE("alternating two-level trajectories have exponential legs") {
  // sigma_z case: after each jump the state is exactly P0 or P1, so the two
  // waiting times alternate between exponential(nu1) and exponential(nu0).
  const double nu1 = 0.9, nu0 = 0.5;
  const auto model = JumpModel::create(
      Matrix::Zero(2, 2), {},
      {{"down", nu1, QuantumChannel::create({sigma_minus()})},
       {"up", nu0, QuantumChannel::create({sigma_plus()})}});
  // Long horizon so the first two legs are practically never censored.
  std::vector<double> legs_down, legs_up;
  for (int i = 0; i < 10000; ++i) {
    pointproc::RngStream rng(99, static_cast<std::uint64_t>(i));
    const auto rec = sample_trajectory(model, excited(), 80.0, rng);
    bool expect_down = true;
    double prev = 0.0;
    for (const auto& ev : rec.trajectory.events) {
      CHECK(ev.label == (expect_down ? "down" : "up"));
      prev = ev.time;
      expect_down = !expect_down;
    }
    (void)prev;
    if (rec.trajectory.events.size() >= 2) {
      legs_down.push_back(rec.trajectory.events[0].time);
      legs_up.push_back(rec.trajectory.events[1].time - rec.trajectory.events[0].time);
    }
  }
  CHECK(testsupport::ks_statistic(legs_down, [&](double t) {
          return 1.0 - std::exp(-nu1 * t);
        }) < 0.02);
  CHECK(testsupport::ks_statistic(legs_up, [&](double t) {
          return 1.0 - std::exp(-nu0 * t);
        }) < 0.02);
}

TEST_CASE("absorbing initial state yields an empty trajectory") {
  const auto model = vertex_model(1, 0.3, 1.0, pauli_z());
  pointproc::RngStream rng(7, 0);
  const auto rec = sample_trajectory(model, ground(), 50.0, rng);
  CHECK(rec.trajectory.events.empty());
  CHECK_FALSE(rec.aborted);
  CHECK(max_abs(rec.states.back().mat - projector_ground()) < 1e-10);
}

TEST_CASE("conditional state replay") {
  SUBCASE("unitary replay of the empty trajectory") {
    std::mt19937_64 gen(11);
    const Matrix h = testsupport::random_hermitian(gen, 2);
    const auto model = JumpModel::create(
        h, {}, {{"null", 1.0, QuantumChannel::create({Matrix::Zero(2, 2)})}});
    const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
    const Trajectory traj{{}, 2.0};
    const auto out = conditional_state(model, rho0, traj, 1.4);
    const Matrix u = expm(Matrix(-kI * 1.4 * h));
    CHECK(max_abs(out.mat - u * rho0.mat * u.adjoint()) < 1e-11);
  }
  SUBCASE("no-jump evolution is the normalized propagator state") {
    const auto model = vertex_model(1, 0.7, 0.8, pauli_x());
    std::mt19937_64 gen(13);
    const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
    const Trajectory traj{{}, 5.0};
    const auto out = conditional_state(model, rho0, traj, 2.1);
    const auto flow = Superoperator::no_jump(model);
    const Matrix evolved = propagate(flow, rho0.mat, 2.1);
    CHECK(max_abs(out.mat - evolved / evolved.trace().real()) < 1e-11);
  }
  SUBCASE("one jump lands on the ground state") {
    const auto model = vertex_model(1, 0.4, 0.9, pauli_z());
    Trajectory traj;
    traj.horizon = 3.0;
    traj.events.push_back({"hop", 1.2});
    const auto out = conditional_state(model, excited(), traj, 1.2);
    CHECK(max_abs(out.mat - projector_ground()) < 1e-11);
  }
  SUBCASE("infeasible trajectory rejected") {
    const auto model = vertex_model(1, 0.0, 0.9, pauli_z());
    Trajectory traj;
    traj.horizon = 3.0;
    traj.events.push_back({"hop", 1.0});
    traj.events.push_back({"hop", 2.0});  // second decay from the ground state
    CHECK_THROWS_AS(conditional_state(model, excited(), traj, 2.5),
                    InfeasibleTrajectoryError);
  }
  SUBCASE("linear and nonlinear routes coincide") {
    // Unnormalized chain trace-normalized equals the replayed state.
    const auto model = vertex_model(1, 1.1, 0.6, pauli_x());
    std::mt19937_64 gen(17);
    const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
    Trajectory traj;
    traj.horizon = 4.0;
    traj.events.push_back({"hop", 0.9});
    traj.events.push_back({"hop", 2.2});
    const auto flow = Superoperator::no_jump(model);
    Matrix sigma = rho0.mat;
    double t_prev = 0.0;
    for (const auto& ev : traj.events) {
      sigma = propagate(flow, sigma, ev.time - t_prev);
      sigma = apply_channel(model.jump_channels[0].channel, sigma);
      t_prev = ev.time;
    }
    sigma = propagate(flow, sigma, 3.5 - t_prev);
    const auto rho = conditional_state(model, rho0, traj, 3.5);
    CHECK(max_abs(sigma / sigma.trace().real() - rho.mat) < 1e-9);
  }
}

TEST_CASE("exclusive density") {
  std::mt19937_64 gen(19);
  const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
  SUBCASE("no jumps reduces to the survival probability") {
    const auto model = vertex_model(1, 0.8, 0.7, pauli_x());
    const Trajectory traj{{}, 2.3};
    CHECK(exclusive_density(model, rho0, traj) ==
          doctest::Approx(survival_probability(model, rho0, 2.3)).epsilon(1e-12));
  }
  SUBCASE("identity channel density is time independent") {
    const double nu = 1.2;
    const auto model = identity_channel_model(nu);
    Trajectory traj;
    traj.horizon = 2.0;
    traj.events.push_back({"tick", 0.3});
    traj.events.push_back({"tick", 0.9});
    traj.events.push_back({"tick", 1.5});
    CHECK(exclusive_density(model, rho0, traj) ==
          doctest::Approx(std::exp(-nu * 2.0)).epsilon(1e-10));
    Trajectory other;
    other.horizon = 2.0;
    other.events.push_back({"tick", 1.7});
    other.events.push_back({"tick", 1.8});
    other.events.push_back({"tick", 1.9});
    CHECK(exclusive_density(model, rho0, other) ==
          doctest::Approx(std::exp(-nu * 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("count distribution") {
  std::mt19937_64 gen(23);
  SUBCASE("identity channel counts are Poisson") {
    const double nu = 1.0, t = 1.0;
    const auto model = identity_channel_model(nu);
    const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
    const auto dist = count_distribution(model, rho0, t, 20);
    for (int m = 0; m <= 20; ++m) {
      CHECK(std::abs(dist.probabilities[m] - testsupport::poisson_pmf(nu * t, m)) <
            1e-6);
    }
    CHECK(dist.remainder < 1e-6);
  }
  SUBCASE("t = 0 concentrates at zero counts") {
    const auto model = identity_channel_model(1.0);
    const auto dist = count_distribution(model, excited(), 0.0, 5);
    CHECK(dist.probabilities[0] == doctest::Approx(1.0));
    for (int m = 1; m <= 5; ++m) CHECK(dist.probabilities[m] == doctest::Approx(0.0));
  }
  SUBCASE("normalization with certified remainder") {
    const auto model = vertex_model(1, 1.0, 0.8, pauli_x());
    const auto dist = count_distribution(model, excited(), 2.5, 25);
    double sum = 0.0;
    for (const double p : dist.probabilities) sum += p;
    CHECK(sum + dist.remainder == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum <= 1.0 + 1e-6);
  }
}

TEST_CASE("mean state") {
  std::mt19937_64 gen(29);
  const auto model = JumpModel::create(
      testsupport::random_hermitian(gen, 2), {Matrix(0.4 * sigma_minus())},
      {{"u", 0.7, QuantumChannel::create({Matrix(0.5 * pauli_x())})}});
  const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
  SUBCASE("t = 0 returns rho0") {
    CHECK(max_abs(mean_state(model, rho0, 0.0).mat - rho0.mat) < 1e-12);
  }
  SUBCASE("unit trace and agreement with an ODE oracle") {
    const auto eta = mean_state(model, rho0, 1.7);
    CHECK(eta.trace() == doctest::Approx(1.0).epsilon(1e-10));
    const Matrix oracle = testsupport::rk4_evolve(
        [&](const Matrix& m) { return apply_generator(model, m); }, rho0.mat, 1.7,
        20000);
    CHECK(max_abs(eta.mat - oracle) < 1e-9);
  }
  SUBCASE("ensemble mean of sampled conditional states matches") {
    const double t = 1.2;
    const int n_traj = 20000;
    Matrix acc = Matrix::Zero(2, 2);
    for (int i = 0; i < n_traj; ++i) {
      pointproc::RngStream rng(5150, static_cast<std::uint64_t>(i));
      const auto rec = sample_trajectory(model, rho0, t, rng);
      REQUIRE_FALSE(rec.aborted);
      acc += rec.states.back().mat;
    }
    acc /= n_traj;
    const auto eta = mean_state(model, rho0, t);
    // Entrywise 3 standard errors; entries are bounded by 1.
    CHECK(max_abs(acc - eta.mat) < 3.0 / std::sqrt(static_cast<double>(n_traj)));
  }
}

TEST_CASE("instrument consistency for counting events") {
  // Unnormalized per-count means sum to the mean state, and each
  // normalized block is a valid conditional state.
  const auto model = vertex_model(1, 0.9, 0.7, pauli_x());
  const auto rho0 = excited();
  const double t = 2.0;
  const auto dist = count_distribution(model, rho0, t, 25);
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& block : dist.event_means) sum += block;
  const auto eta = mean_state(model, rho0, t);
  CHECK(max_abs(sum - eta.mat) < 1e-6);
  for (std::size_t m = 0; m < dist.event_means.size(); ++m) {
    if (dist.probabilities[m] < 1e-12) continue;
    const Matrix cond = dist.event_means[m] / dist.probabilities[m];
    CHECK(cond.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(min_eigenvalue(cond) > -1e-9);
  }
}

TEST_CASE("sampler matches the analytic count distribution") {
  const auto model = vertex_model(1, 1.0, 0.8, pauli_x());
  const auto rho0 = excited();
  const double t = 2.0;
  const int n_traj = 20000;
  std::vector<int> histogram(30, 0);
  for (int i = 0; i < n_traj; ++i) {
    pointproc::RngStream rng(31337, static_cast<std::uint64_t>(i));
    const auto rec = sample_trajectory(model, rho0, t, rng);
    const std::size_t m = rec.trajectory.events.size();
    if (m < histogram.size()) ++histogram[m];
  }
  const auto dist = count_distribution(model, rho0, t, 25);
  for (int m = 0; m < 8; ++m) {
    const double p = dist.probabilities[m];
    const double se = std::sqrt(p * (1 - p) / n_traj);
    CHECK(std::abs(histogram[m] / static_cast<double>(n_traj) - p) <
          3.0 * se + 1e-9);
  }
}

TEST_CASE("waiting densities from the effective-Hamiltonian adapter") {
  // EP model with c_tilde = lambda0; engine-level waiting density matches
  // the quadrature moments computed by the dedicated module.
  const Complex beta(0.7, 0.2), delta(0.0, 0.0);
  const Complex alpha = 0.0;
  Matrix h_eff(2, 2);
  h_eff << alpha, beta, delta, -alpha;
  const double lambda0 = std::abs(beta) + std::abs(delta);
  const auto eff = nonh::decompose(Matrix(h_eff - 0.5 * kI * lambda0 * Matrix::Identity(2, 2)),
                                   std::nullopt);
  const auto params = nonh::c2_parametrize(eff.h_eff, eff.c);
  const auto basis = nonh::ep_basis(params);
  const auto model = nonh::to_jump_model(eff, 1.0);
  const auto psi0 = pure_state(basis.phi0);
  for (double dt : {0.2, 0.8, 2.0}) {
    CHECK(waiting_density(model, psi0, dt) ==
          doctest::Approx(nonh::waiting_density_nh(params, psi0, dt)).epsilon(1e-9));
  }
}
