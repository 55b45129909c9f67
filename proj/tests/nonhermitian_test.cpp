#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "engine.hpp"
#include "nonhermitian.hpp"
#include "support/oracles.hpp"

using namespace qjt;
using namespace qjt::nonh;
using qops::DensityOperator;
using qops::pure_state;
using testsupport::max_abs;

namespace {

Matrix k_matrix(Complex alpha, Complex beta, Complex delta) {
  Matrix k(2, 2);
  k << alpha, beta, delta, -alpha;
  return k;
}

// Traceless EP parameters with c_tilde = |beta| + |delta| (tight positivity).
C2Params ep_params(Complex beta, Complex delta) {
  Complex alpha = 0.0;
  if (beta != Complex(0.0) && delta != Complex(0.0)) {
    alpha = kI * std::sqrt(beta * delta);  // alpha^2 = -beta delta
  }
  const double lambda0 = std::abs(beta) + std::abs(delta);
  return c2_from_entries(alpha, -alpha, beta, delta, lambda0);
}

}  // namespace

TEST_CASE("decompose") {
  std::mt19937_64 gen(3);
  SUBCASE("Hermitian input needs no decay") {
    const Matrix h = testsupport::random_hermitian(gen, 3);
    const auto eff = decompose(h, std::nullopt);
    CHECK(eff.c == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(max_abs(eff.rate_operator) < 1e-10);
    CHECK(max_abs(eff.hermitian_part - h) < 1e-12);
  }
  SUBCASE("two-level walk effective Hamiltonian recovers R = nu P1") {
    const double nu = 0.8;
    const Matrix h1 = 0.45 * qops::pauli_x();
    const Matrix h_eff = h1 - 0.5 * kI * nu * qops::projector_excited();
    const auto eff = decompose(h_eff, std::nullopt);
    CHECK(std::abs(eff.c) < 1e-12);
    CHECK(max_abs(eff.rate_operator - nu * qops::projector_excited()) < 1e-10);
    // Round trip: H - (i/2) R equals the input (c = 0 here).
    CHECK(max_abs(eff.hermitian_part - 0.5 * kI * eff.rate_operator - h_eff) < 1e-12);
  }
  SUBCASE("explicit c below the bound is rejected with the dim-2 message") {
    const Matrix h_eff = k_matrix(Complex(0, 0.5), 1.0, 0.2);
    try {
      decompose(h_eff, 0.0);
      FAIL("expected ModelError");
    } catch (const ModelError& e) {
      CHECK(std::string(e.what()).find("c_tilde >= k") != std::string::npos);
    }
    CHECK_NOTHROW(decompose(h_eff, 5.0));
  }
  SUBCASE("auto c zeroes the smallest eigenvalue of R") {
    const Matrix h_eff = testsupport::random_matrix(gen, 4, 0.7);
    const auto eff = decompose(h_eff, std::nullopt);
    CHECK(std::abs(qops::min_eigenvalue(eff.rate_operator)) < 1e-10);
  }
}

TEST_CASE("c2 parametrization") {
  SUBCASE("reference worked example") {
    const double s = 1.3, phi = 0.6;
    const Matrix k = s * k_matrix(Complex(0, std::sin(phi)), 1.0, 1.0);
    const auto p = c2_parametrize(k, 3.0);
    CHECK(p.kappa.real() == doctest::Approx(s * s * std::cos(phi) * std::cos(phi))
                                .epsilon(1e-12));
    CHECK(std::abs(p.kappa.imag()) < 1e-12);
    CHECK(std::abs(p.z - Complex(s * std::cos(phi), 0)) < 1e-12);
    CHECK(p.k == doctest::Approx(2 * s * std::sin(phi)).epsilon(1e-12));
  }
  SUBCASE("beta = conj(delta) with equal imaginary levels is Hermitian") {
    const Complex beta(0.4, -0.7);
    const auto unitary = c2_from_entries(Complex(1.0, 0.3), Complex(-2.0, 0.3), beta,
                                         std::conj(beta), 0.6);
    CHECK(unitary.k == doctest::Approx(0.0));
    CHECK(classify(unitary) == Regime::unitary);  // c_tilde = 0.6 - 0.6 = 0
    const auto uniform = c2_from_entries(Complex(1.0, 0.3), Complex(-2.0, 0.3), beta,
                                         std::conj(beta), 1.4);
    CHECK(classify(uniform) == Regime::uniform);  // c_tilde = 0.8 > 0
  }
  SUBCASE("unified literature family") {
    const double e1 = 1.0, e0 = 0.4, g1 = 0.9, g0 = 0.2, theta = 1.1;
    const Complex beta(0.8, 0.33);
    const Complex delta = std::conj(beta) * std::exp(kI * theta);
    const auto p = c2_from_entries(Complex(e1, -g1), Complex(e0, -g0), beta, delta, 2.0);
    const double expected =
        std::sqrt(4.0 * std::norm(beta) * std::pow(std::sin(theta / 2), 2) +
                  (g1 - g0) * (g1 - g0));
    CHECK(p.k == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("regime classification") {
    CHECK(classify(c2_from_entries(1.0, -1.0, 0.5, 0.5, 0.0)) == Regime::unitary);
    CHECK(classify(c2_from_entries(1.0, -1.0, 0.5, 0.5, 0.8)) == Regime::uniform);
    CHECK(classify(ep_params(1.0, 0.3)) == Regime::exceptional);
    CHECK(classify(c2_from_entries(0.9, -0.9, 0.5, 0.1, 3.0)) == Regime::generic);
  }
}

TEST_CASE("exceptional-point basis") {
  SUBCASE("beta = 0 branch") {
    const double gamma = 0.7;
    const auto p = ep_params(0.0, std::polar(1.0, gamma));
    const auto b = ep_basis(p);
    CHECK(std::abs(b.phi0(0)) < 1e-14);
    CHECK(std::abs(b.phi0(1) - std::polar(1.0, gamma)) < 1e-14);
    CHECK(std::abs(b.phi1(0) - 1.0) < 1e-14);
    CHECK(std::abs(b.phi1(1)) < 1e-14);
  }
  SUBCASE("delta = 0 branch") {
    const Complex beta = std::polar(0.8, 1.2);
    const auto p = ep_params(beta, 0.0);
    const auto b = ep_basis(p);
    CHECK(std::abs(b.phi0(0) - 1.0) < 1e-14);
    CHECK(std::abs(b.phi1(1) - std::polar(1.0, -std::arg(beta))) < 1e-14);
  }
  SUBCASE("generic branch annihilates phi0 and maps phi1 onto phi0") {
    const auto p = ep_params(Complex(0.5, 0.4), Complex(-0.3, 0.8));
    const auto b = ep_basis(p);
    CHECK((p.K * b.phi0).norm() < 1e-12);
    CHECK((p.K * b.phi1 - b.lambda0 * b.phi0).norm() < 1e-10);
    CHECK(std::abs(b.phi0.norm() - 1.0) < 1e-12);
    CHECK(std::abs(b.phi1.norm() - 1.0) < 1e-12);
    CHECK(std::abs(b.phi0.dot(b.phi1)) < 1e-12);
    // K reconstructs as lambda0 |phi0><phi1|.
    CHECK(max_abs(p.K - b.lambda0 * (b.phi0 * b.phi1.adjoint())) < 1e-12);
  }
  SUBCASE("regime guard") {
    CHECK_THROWS_AS(ep_basis(c2_from_entries(0.9, -0.9, 0.5, 0.1, 3.0)), RegimeError);
  }
}

TEST_CASE("propagator of K") {
  SUBCASE("t = 0 is the identity") {
    const auto p = ep_params(1.0, 0.2);
    CHECK(max_abs(propagator_K(p, 0.0) - Matrix::Identity(2, 2)) == 0.0);
  }
  SUBCASE("EP propagator is linear in t") {
    const auto p = ep_params(Complex(0.6, 0.1), Complex(0.2, -0.5));
    for (double t : {0.3, 1.5, 6.0}) {
      CHECK(max_abs(propagator_K(p, t) - (Matrix::Identity(2, 2) - kI * t * p.K)) <
            1e-12 * std::max(1.0, t * p.scale));
    }
  }
  SUBCASE("matches the Pade exponential oracle") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto k = testsupport::random_matrix(gen, 2, 0.8);
      const Matrix k0 = k - 0.5 * k.trace() * Matrix::Identity(2, 2);
      const auto p = c2_parametrize(k0, 10.0);
      for (double t : {0.4, 1.9}) {
        const Matrix direct = Matrix(-kI * t * k0).exp();
        CHECK(max_abs(propagator_K(p, t) - direct) <
              1e-11 * std::max(1.0, max_abs(direct)));
      }
    }
  }
  SUBCASE("series and eigendecomposition agree out of the EP") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
      const auto k = testsupport::random_matrix(gen, 2, 0.6);
      const Matrix k0 = k - 0.5 * k.trace() * Matrix::Identity(2, 2);
      const auto p = c2_parametrize(k0, 10.0);
      if (classify(p) != Regime::generic) continue;
      const auto eig = eigensystem(p);
      for (double t : {0.5, 3.0, 10.0}) {
        const Matrix via_v = std::exp(-kI * eig.z * t) * eig.V_plus +
                             std::exp(kI * eig.z * t) * eig.V_minus;
        const Matrix via_g = propagator_K(p, t);
        CHECK(max_abs(via_v - via_g) < 1e-10 * std::max(1.0, max_abs(via_g)));
      }
    }
  }
  SUBCASE("continuity across the EP switch") {
    // |kappa| = 1e-9 * scale^2: the propagator takes the series branch but
    // the eigensystem is still defined; the two must agree to 1e-6.
    const Complex beta(0.8, 0.1), delta(0.4, -0.3);
    const Complex alpha = kI * std::sqrt(beta * delta * (1.0 - 1e-9));
    const auto p = c2_from_entries(alpha, -alpha, beta, delta, 5.0);
    REQUIRE(std::abs(p.kappa) < default_tolerances().ep_switch * p.scale * p.scale);
    const auto eig = eigensystem(p);
    for (double t : {0.5, 2.0, 8.0}) {
      const Matrix via_v = std::exp(-kI * eig.z * t) * eig.V_plus +
                           std::exp(kI * eig.z * t) * eig.V_minus;
      CHECK(max_abs(propagator_K(p, t) - via_v) < 1e-6);
    }
  }
}

TEST_CASE("g series against closed forms") {
  for (double r : {0.5, 3.0, 20.0, 100.0}) {
    for (int a = 0; a < 12; ++a) {
      const Complex xi = std::polar(r, a * 0.5235987755982988);
      const Complex gp_c = g_plus(xi), gm_c = g_minus(xi);
      const Complex gp_s = g_plus_series(xi), gm_s = g_minus_series(xi);
      CHECK(std::abs(gp_c - gp_s) <= 1e-12 * std::max(1.0, std::abs(gp_c)));
      CHECK(std::abs(gm_c - gm_s) <= 1e-12 * std::max(1.0, std::abs(gm_c)));
    }
  }
}

TEST_CASE("eigensystem") {
  SUBCASE("idempotents and eigenvectors") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 40; ++trial) {
      const auto k = testsupport::random_matrix(gen, 2, 0.7);
      const Matrix k0 = k - 0.5 * k.trace() * Matrix::Identity(2, 2);
      const auto p = c2_parametrize(k0, 10.0);
      if (classify(p) != Regime::generic) continue;
      const auto e = eigensystem(p);
      const Matrix id = Matrix::Identity(2, 2);
      CHECK(max_abs(e.V_plus * e.V_plus - e.V_plus) < 1e-12 * std::max(1.0, max_abs(e.V_plus)));
      CHECK(max_abs(e.V_minus * e.V_plus) < 1e-12 * std::max(1.0, max_abs(e.V_plus)));
      CHECK(max_abs(e.V_plus + e.V_minus - id) < 1e-12);
      CHECK((p.K * e.u_plus - e.z * e.u_plus).norm() < 1e-10 * std::max(1.0, std::abs(e.z)));
      CHECK((p.K * e.u_minus + e.z * e.u_minus).norm() < 1e-10 * std::max(1.0, std::abs(e.z)));
      CHECK(max_abs(p.K - e.z * e.V_plus + e.z * e.V_minus) < 1e-10);
      // K V+- psi = +- z V+- psi on an arbitrary vector.
      Vector probe(2);
      probe << Complex(0.3, -0.8), Complex(0.7, 0.4);
      CHECK((p.K * (e.V_plus * probe) - e.z * (e.V_plus * probe)).norm() < 1e-10);
      CHECK((p.K * (e.V_minus * probe) + e.z * (e.V_minus * probe)).norm() < 1e-10);
    }
  }
  SUBCASE("branch flip exchanges the pair but not the propagator") {
    const auto p = c2_from_entries(Complex(0.4, 0.2), Complex(-0.4, -0.2),
                                   Complex(0.9, -0.1), Complex(0.2, 0.6), 5.0);
    const auto e = eigensystem(p);
    for (double t : {0.7, 2.3}) {
      const Matrix flipped = std::exp(-kI * (-e.z) * t) * e.V_minus +
                             std::exp(kI * (-e.z) * t) * e.V_plus;
      CHECK(max_abs(flipped - propagator_K(p, t)) <
            1e-12 * std::max(1.0, max_abs(flipped)));
    }
  }
  SUBCASE("reference eigenvectors of the oscillating example") {
    const double s = 1.0, phi = 0.25 * M_PI;
    const Matrix k = s * k_matrix(Complex(0, std::sin(phi)), 1.0, 1.0);
    const auto p = c2_parametrize(k, 10.0);
    const auto e = eigensystem(p);
    Vector up_ref(2), um_ref(2);
    up_ref << 0.5 * Complex(1.0, 1.0), 0.5 * std::sqrt(2.0);
    um_ref << 0.5 * Complex(-1.0, 1.0), 0.5 * std::sqrt(2.0);
    // Equality up to a global phase.
    const Complex phase_p = up_ref.dot(e.u_plus) / std::norm(up_ref.norm());
    const Complex phase_m = um_ref.dot(e.u_minus) / std::norm(um_ref.norm());
    CHECK((e.u_plus - phase_p * up_ref).norm() < 1e-12);
    CHECK((e.u_minus - phase_m * um_ref).norm() < 1e-12);
    CHECK(std::abs(std::abs(e.u_plus.dot(e.u_minus)) - std::abs(Complex(0.5, 0.5))) <
          1e-12);
  }
  SUBCASE("orthogonality iff K/z is Hermitian") {
    // K proportional to a Hermitian matrix through a phase: k > 0 but the
    // eigenvectors stay orthogonal.
    const Complex phase = std::polar(1.0, 0.4);
    const Complex b(0.3, 0.4);
    const auto prop = c2_from_entries(0.7 * phase, -0.7 * phase, b * phase,
                                      std::conj(b) * phase, 4.0);
    REQUIRE(classify(prop) == Regime::generic);
    const auto eh = eigensystem(prop);
    CHECK(std::abs(eh.u_plus.dot(eh.u_minus)) < 1e-12);
    CHECK(qops::hermiticity_defect(Matrix(prop.K / eh.z)) < 1e-12);
    // Genuinely skew instance: eigenvectors overlap.
    const auto skew = c2_from_entries(Complex(0.5, 0.2), Complex(-0.5, -0.2),
                                      Complex(0.9, 0.0), Complex(0.1, 0.0), 4.0);
    const auto es = eigensystem(skew);
    CHECK(std::abs(es.u_plus.dot(es.u_minus)) > 1e-3);
    CHECK(qops::hermiticity_defect(Matrix(skew.K / es.z)) > 1e-3);
  }
  SUBCASE("beta delta = 0 uses z = alpha") {
    const auto p = c2_from_entries(Complex(0.5, -0.2), Complex(-0.5, 0.2), 0.7, 0.0,
                                   4.0);
    const auto e = eigensystem(p);
    CHECK(std::abs(e.z - p.alpha) < 1e-14);
    CHECK((p.K * e.u_plus - e.z * e.u_plus).norm() < 1e-12);
    CHECK((p.K * e.u_minus + e.z * e.u_minus).norm() < 1e-12);
  }
}

TEST_CASE("survival probability") {
  SUBCASE("t = 0 gives 1") {
    const auto p = ep_params(0.8, 0.1);
    CHECK(survival(p, pure_state(ep_basis(p).phi0), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("positivity precondition") {
    const auto p = c2_from_entries(Complex(0, 0.5), Complex(0, -0.5), 1.0, 0.2, 0.0);
    REQUIRE(p.c_tilde < p.k);
    CHECK_THROWS_AS(survival(p, pure_state(Vector::Unit(2, 0)), 1.0), ModelError);
  }
  SUBCASE("real-eigenvalue norm evolution") {
    const double s = 0.9, phi = 0.3;
    const Matrix k = s * k_matrix(Complex(0, std::sin(phi)), 1.0, 1.0);
    const auto p = c2_parametrize(k, 2.0 * s * std::sin(phi));
    REQUIRE(p.c_tilde == doctest::Approx(p.k));
    const auto e = eigensystem(p);
    const Complex x_plus(0.6, 0.1);
    // Solve |x+|^2+|x-|^2+2Re(conj(x+) x- <u+|u->) = 1 for a real x-.
    const Complex overlap = e.u_plus.dot(e.u_minus);
    double x_minus = 0.55;
    for (int iter = 0; iter < 200; ++iter) {
      const double norm2 = std::norm(x_plus) + x_minus * x_minus +
                           2.0 * std::real(std::conj(x_plus) * x_minus * overlap);
      x_minus -= (norm2 - 1.0) * 0.3;
    }
    const Vector psi = x_plus * e.u_plus + x_minus * e.u_minus;
    REQUIRE(psi.norm() == doctest::Approx(1.0).epsilon(1e-6));
    for (double t : {0.5, 1.7, 4.0}) {
      const double z = e.z.real();
      const double expected =
          1.0 + 2.0 * std::real((std::exp(2.0 * kI * z * t) - 1.0) *
                                std::conj(x_plus) * x_minus * overlap);
      const double surv = survival(p, pure_state(psi), t);
      CHECK(surv == doctest::Approx(std::exp(-p.c_tilde * t) * expected).epsilon(1e-9));
    }
  }
  SUBCASE("asymptotic survival family keeps one eigencomponent") {
    // |beta| = |delta|, exp(2i arg alpha) = exp(i theta) != 1, c_tilde = 2|Im z|.
    const double theta = 0.9, r = 0.7, a = 0.5;
    const Complex beta = std::polar(r, 0.2);
    const Complex delta = std::conj(beta) * std::exp(kI * theta);
    const Complex alpha = std::polar(a, 0.5 * theta);
    Matrix k(2, 2);
    k << alpha, beta, delta, -alpha;
    auto p0 = c2_parametrize(k, 1.0);
    const double c_tilde = 2.0 * std::abs(p0.z.imag());
    REQUIRE(c_tilde > 0.0);
    const auto p = c2_parametrize(k, c_tilde);
    REQUIRE(p.c_tilde == doctest::Approx(p.k).epsilon(1e-9));
    const auto e = eigensystem(p);
    // State with weight on both eigenvectors.
    Vector psi = 0.8 * e.u_plus + 0.6 * e.u_minus;
    psi /= psi.norm();
    Vector raw = 0.8 * e.u_plus + 0.6 * e.u_minus;
    const Complex x_plus = 0.8 / raw.norm();
    const Complex x_minus = 0.6 / raw.norm();
    // |e^{-izt}|^2 = e^{2t Im z}: the plus component survives for Im z > 0.
    const double surviving =
        p.z.imag() > 0 ? std::norm(x_plus) : std::norm(x_minus);
    const double s_late = survival(p, pure_state(psi), 220.0);
    CHECK(s_late == doctest::Approx(surviving).epsilon(1e-6));
    CHECK(s_late > 0.0);
  }
}

TEST_CASE("waiting-time density") {
  SUBCASE("EP moment table") {
    const auto p = ep_params(Complex(0.5, 0.3), Complex(-0.2, 0.6));
    const auto b = ep_basis(p);
    const double l0 = b.lambda0;
    const Vector psi_mix_minus = (b.phi0 - kI * b.phi1) / std::sqrt(2.0);
    const Vector psi_mix_plus = (b.phi0 + kI * b.phi1) / std::sqrt(2.0);
    const struct {
      Vector psi;
      double mean, var;
    } cases[] = {
        {b.phi0, 1.0, 1.0},
        {psi_mix_minus, 1.0, 3.0},
        {psi_mix_plus, 3.0, 3.0},
        {b.phi1, 3.0, 5.0},
    };
    for (const auto& c : cases) {
      const auto m = waiting_moments(p, pure_state(c.psi));
      CHECK(m.total_probability == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(m.mean * l0 == doctest::Approx(c.mean).epsilon(1e-7));
      CHECK(m.variance * l0 * l0 == doctest::Approx(c.var).epsilon(1e-7));
    }
  }
  SUBCASE("oscillating density with a train of zeros") {
    const double s = 1.0;
    const Matrix k = s * k_matrix(Complex(0, std::sin(M_PI / 4)), 1.0, 1.0);
    const auto p = c2_parametrize(k, 2.0 * s * std::sin(M_PI / 4));
    const auto e = eigensystem(p);
    const Complex x_plus(0.5, 0.5);
    const Complex x_minus(0.0, 1.0 / std::sqrt(2.0));
    const Vector psi = x_plus * e.u_plus + x_minus * e.u_minus;
    REQUIRE(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto rho = pure_state(psi);
    const double root2s = std::sqrt(2.0) * s;
    for (double t = 0.0; t <= 10.0; t += 0.01) {
      const double expected = std::exp(-root2s * t) * s *
                              (std::sqrt(2.0) - std::sin(root2s * t) +
                               std::cos(root2s * t));
      CHECK(std::abs(waiting_density_nh(p, rho, t) - expected) < 1e-9);
    }
  }
  SUBCASE("boundary positivity at c_tilde = k for the stress states") {
    const auto p = ep_params(Complex(0.4, 0.1), Complex(0.7, -0.3));
    const auto b = ep_basis(p);
    const Vector stress1 = (b.phi0 + kI * b.phi1) / std::sqrt(2.0);
    for (const Vector& psi : {stress1, Vector(b.phi1)}) {
      const auto rho = pure_state(psi);
      double min_val = 1e300;
      for (double t = 0.0; t <= 12.0; t += 0.004) {
        min_val = std::min(min_val, waiting_density_nh(p, rho, t));
      }
      CHECK(min_val >= -1e-10);
    }
  }
  SUBCASE("density integrates to one minus the tail") {
    const auto p = c2_from_entries(Complex(0.4, -0.1), Complex(-0.4, 0.1),
                                   Complex(0.8, 0.2), Complex(0.3, 0.5), 4.0);
    std::mt19937_64 gen(21);
    const auto rho = DensityOperator::create(testsupport::random_density(gen, 2));
    const auto m = waiting_moments(p, rho);
    CHECK(m.total_probability + m.tail == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("conditional no-jump state is c independent") {
  const Matrix h_eff = k_matrix(Complex(0.3, -0.2), Complex(0.7, 0.1), Complex(0.2, 0.4));
  const auto eff_a = decompose(h_eff, std::nullopt);
  const auto eff_b = decompose(h_eff, eff_a.c + 0.9);
  const auto model_a = to_jump_model(eff_a, 1.0);
  const auto model_b = to_jump_model(eff_b, 1.0);
  std::mt19937_64 gen(23);
  const auto rho0 = DensityOperator::create(testsupport::random_density(gen, 2));
  const engine::Trajectory empty{{}, 3.0};
  for (double t : {0.5, 1.8, 3.0}) {
    const auto sa = engine::conditional_state(model_a, rho0, empty, t);
    const auto sb = engine::conditional_state(model_b, rho0, empty, t);
    CHECK(max_abs(sa.mat - sb.mat) < 1e-12);
  }
}
