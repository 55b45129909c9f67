#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qops.hpp"
#include "support/oracles.hpp"

using namespace qjt;
using namespace qjt::qops;
using testsupport::max_abs;

namespace {

JumpModel identity_channel_model(double rate) {
  return JumpModel::create(Matrix::Zero(2, 2), {},
                           {{"tick", rate, QuantumChannel::create({Matrix::Identity(2, 2)})}});
}

// Local model of the two-level walk at vertex x(1): H1, jump channel E1.
JumpModel vertex1_model(double omega, double nu, const Matrix& axis) {
  return JumpModel::create(Matrix(0.5 * omega * axis), {},
                           {{"decay", nu, QuantumChannel::create({sigma_minus()})}});
}

}  // namespace

TEST_CASE("channel application matches the closed channel table") {
  std::mt19937_64 gen(7);
  const Matrix rho = testsupport::random_density(gen, 2);

  SUBCASE("identity channel returns the input") {
    const auto id = QuantumChannel::create({Matrix::Identity(2, 2)});
    CHECK(max_abs(apply_channel(id, rho) - rho) < 1e-15);
  }
  SUBCASE("lowering channel maps to diag(0, rho11)") {
    const auto e1 = QuantumChannel::create({sigma_minus()});
    Matrix expected = Matrix::Zero(2, 2);
    expected(1, 1) = rho(0, 0);
    CHECK(max_abs(apply_channel(e1, rho) - expected) < 1e-15);
  }
  SUBCASE("raising channel maps to diag(rho00, 0)") {
    const auto e0 = QuantumChannel::create({sigma_plus()});
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = rho(1, 1);
    CHECK(max_abs(apply_channel(e0, rho) - expected) < 1e-15);
  }
  SUBCASE("dephasing-to-diagonal channel") {
    const auto epm = QuantumChannel::create({sigma_plus(), sigma_minus()});
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = rho(1, 1);
    expected(1, 1) = rho(0, 0);
    CHECK(max_abs(apply_channel(epm, rho) - expected) < 1e-15);
  }
}

TEST_CASE("channel validation") {
  CHECK_THROWS_AS(QuantumChannel::create({}), ModelError);
  // Trace increasing: K = 1.1 * identity.
  CHECK_THROWS_AS(QuantumChannel::create({Matrix(1.1 * Matrix::Identity(2, 2))}),
                  ModelError);
  const auto ch = QuantumChannel::create({sigma_minus()});
  CHECK_THROWS_AS(apply_channel(ch, Matrix::Identity(3, 3)), ArgumentError);
}

TEST_CASE("channel positivity on random Kraus families") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + static_cast<int>(gen() % 3);
    std::vector<Matrix> kraus;
    Matrix sum = Matrix::Zero(dim, dim);
    for (int j = 0; j < 2; ++j) {
      Matrix k = testsupport::random_matrix(gen, dim, 0.4);
      kraus.push_back(k);
      sum += k.adjoint() * k;
    }
    // Rescale into the trace-nonincreasing regime.
    const double top = sum.operatorNorm();
    for (auto& k : kraus) k /= std::sqrt(top * 1.01);
    const auto ch = QuantumChannel::create(kraus);
    const Matrix out = apply_channel(ch, testsupport::random_density(gen, dim));
    CHECK(min_eigenvalue(out) >= -1e-10);
  }
}

TEST_CASE("generator conserves trace") {
  std::mt19937_64 gen(13);
  const Matrix h = testsupport::random_hermitian(gen, 3);
  const Matrix l1 = testsupport::random_matrix(gen, 3, 0.5);
  const auto model = JumpModel::create(
      h, {l1},
      {{"a", 0.7, QuantumChannel::create({testsupport::random_kraus(gen, 3)})},
       {"b", 1.3, QuantumChannel::create({testsupport::random_kraus(gen, 3)})}});
  for (int i = 0; i < 1000; ++i) {
    const Matrix rho = testsupport::random_hermitian(gen, 3);
    const double norm = rho.cwiseAbs().maxCoeff();
    CHECK(std::abs(apply_generator(model, rho).trace()) <= 1e-12 * std::max(norm, 1.0));
  }
}

TEST_CASE("generator special cases") {
  std::mt19937_64 gen(17);
  const Matrix rho = testsupport::random_density(gen, 2);

  SUBCASE("identity jump channel at unit rate cancels exactly") {
    const auto model = identity_channel_model(1.0);
    CHECK(max_abs(apply_generator(model, rho)) < 1e-14);
  }
  SUBCASE("Hamiltonian only gives the commutator") {
    const Matrix h = testsupport::random_hermitian(gen, 2);
    // Zero-Kraus channel: no gain, no decay, but nu > 0 stays valid.
    const auto model = JumpModel::create(
        h, {}, {{"null", 1.0, QuantumChannel::create({Matrix::Zero(2, 2)})}});
    const Matrix expected = -kI * (h * rho - rho * h);
    CHECK(max_abs(apply_generator(model, rho) - expected) < 1e-14);
    CHECK(std::abs(apply_generator(model, rho).trace()) < 1e-14);
  }
  SUBCASE("two-level walk generator at vertex x(1)") {
    const double omega = 0.8, nu = 0.6;
    const auto model = vertex1_model(omega, nu, pauli_z());
    const Matrix h1 = 0.5 * omega * pauli_z();
    const Matrix p1 = projector_excited();
    const Matrix expected = -kI * (h1 * rho - rho * h1) +
                            nu * sigma_minus() * rho * sigma_plus() -
                            0.5 * nu * (p1 * rho + rho * p1);
    CHECK(max_abs(apply_generator(model, rho) - expected) < 1e-14);
    CHECK(std::abs(apply_generator(model, rho).trace()) < 1e-14);
  }
}

TEST_CASE("no-jump generator splits the generator") {
  std::mt19937_64 gen(19);
  const Matrix rho = testsupport::random_density(gen, 2);

  SUBCASE("no gain means A equals L0") {
    const Matrix h = testsupport::random_hermitian(gen, 2);
    const auto model = JumpModel::create(
        h, {}, {{"null", 2.0, QuantumChannel::create({Matrix::Zero(2, 2)})}});
    CHECK(max_abs(apply_no_jump_generator(model, rho) - apply_generator(model, rho)) <
          1e-14);
  }
  SUBCASE("pure Hamiltonian case is the effective-Hamiltonian sandwich") {
    const auto model = vertex1_model(0.9, 0.5, pauli_x());
    const Matrix h_eff = model.hamiltonian - 0.5 * kI * model.rate_operator;
    const Matrix expected = -kI * h_eff * rho + kI * rho * h_eff.adjoint();
    CHECK(max_abs(apply_no_jump_generator(model, rho) - expected) < 1e-14);
    const auto flow = Superoperator::no_jump(model);
    REQUIRE(flow.has_effective_hamiltonian());
    CHECK(max_abs(flow.effective_hamiltonian() - h_eff) < 1e-14);
  }
  SUBCASE("A is L minus the gain") {
    const auto model = vertex1_model(0.3, 1.1, pauli_z());
    const Matrix gain = apply_gain(model, rho);
    CHECK(max_abs(apply_generator(model, rho) - apply_no_jump_generator(model, rho) -
                  gain) < 1e-14);
  }
}

TEST_CASE("derived R matches the adjoint identity") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + static_cast<int>(gen() % 2);
    std::vector<JumpChannel> channels;
    for (int u = 0; u < 2; ++u) {
      channels.push_back({"u" + std::to_string(u), 0.5 + 0.1 * u,
                          QuantumChannel::create({testsupport::random_kraus(gen, dim)})});
    }
    const auto model =
        JumpModel::create(Matrix::Zero(dim, dim), {}, channels);
    Matrix expected = Matrix::Zero(dim, dim);
    for (const auto& jc : model.jump_channels) {
      expected += jc.rate * channel_adjoint_identity(jc.channel);
    }
    CHECK(max_abs(model.rate_operator - expected) < 1e-10);
  }
}

TEST_CASE("propagate basics") {
  std::mt19937_64 gen(29);
  const Matrix rho = testsupport::random_density(gen, 2);

  SUBCASE("dt = 0 returns the state") {
    const auto model = identity_channel_model(1.0);
    CHECK(max_abs(propagate(Superoperator::no_jump(model), rho, 0.0) - rho) == 0.0);
  }
  SUBCASE("negative dt rejected") {
    const auto model = identity_channel_model(1.0);
    CHECK_THROWS_AS(propagate(Superoperator::no_jump(model), rho, -1.0), ArgumentError);
  }
  SUBCASE("uniform decay R = nu 1") {
    const double nu = 0.7;
    const auto model = JumpModel::create(
        Matrix::Zero(2, 2), {},
        {{"tick", nu, QuantumChannel::create({Matrix::Identity(2, 2)})}});
    const auto flow = Superoperator::no_jump(model);
    for (double dt : {0.1, 0.9, 2.5}) {
      CHECK(max_abs(propagate(flow, rho, dt) - std::exp(-nu * dt) * rho) < 1e-12);
    }
  }
  SUBCASE("two-level walk survival from the excited state") {
    const double nu = 0.8;
    const auto model = vertex1_model(0.5, nu, pauli_z());
    const auto flow = Superoperator::no_jump(model);
    const Matrix from_excited = propagate(flow, projector_excited(), 1.3);
    CHECK(from_excited.trace().real() == doctest::Approx(std::exp(-nu * 1.3)).epsilon(1e-12));
    const Matrix from_ground = propagate(flow, projector_ground(), 1.3);
    CHECK(from_ground.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("propagate semigroup law") {
  std::mt19937_64 gen(31);
  const Matrix h = testsupport::random_hermitian(gen, 2);
  const auto model = JumpModel::create(
      h, {Matrix(0.3 * sigma_minus())},
      {{"u", 0.9, QuantumChannel::create({Matrix(0.4 * pauli_x())})}});
  const auto flow = Superoperator::no_jump(model);
  const Matrix rho = testsupport::random_density(gen, 2);
  const Matrix one_shot = propagate(flow, rho, 1.7);
  const Matrix two_step = propagate(flow, propagate(flow, rho, 0.6), 1.1);
  CHECK(max_abs(one_shot - two_step) < 1e-9);
}

TEST_CASE("propagate matches an independent ODE oracle") {
  std::mt19937_64 gen(37);
  // Model with smooth Lindblads: exercises the superoperator-matrix path.
  const Matrix h = testsupport::random_hermitian(gen, 3);
  const Matrix l = 0.6 * testsupport::random_matrix(gen, 3, 0.5);
  const auto model = JumpModel::create(
      h, {l},
      {{"u", 0.8, QuantumChannel::create({testsupport::random_kraus(gen, 3)})}});
  const Matrix rho = testsupport::random_density(gen, 3);
  const auto flow = Superoperator::no_jump(model);
  const Matrix fast = propagate(flow, rho, 1.4);
  const Matrix oracle = testsupport::rk4_evolve(
      [&](const Matrix& m) { return apply_no_jump_generator(model, m); }, rho, 1.4,
      20000);
  CHECK(max_abs(fast - oracle) < 1e-9 * std::max(1.0, max_abs(oracle)));
  CHECK(fast.trace().real() <= rho.trace().real() + 1e-10);

  // Pure-Hamiltonian path as well.
  const auto model2 = vertex1_model(1.1, 0.7, pauli_x());
  const Matrix rho2 = testsupport::random_density(gen, 2);
  const auto flow2 = Superoperator::no_jump(model2);
  const Matrix fast2 = propagate(flow2, rho2, 2.2);
  const Matrix oracle2 = testsupport::rk4_evolve(
      [&](const Matrix& m) { return apply_no_jump_generator(model2, m); }, rho2, 2.2,
      20000);
  CHECK(max_abs(fast2 - oracle2) < 1e-9);
}

TEST_CASE("small dense exponential matches Eigen") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = testsupport::random_matrix(gen, 2, 1.5);
    const Matrix closed = expm(a);
    const Matrix pade = a.exp();
    CHECK(max_abs(closed - pade) < 1e-12 * std::max(1.0, max_abs(pade)));
  }
  // Near-defective case: tiny traceless part.
  Matrix nilpotentish(2, 2);
  nilpotentish << 1e-9, 1.0, 0.0, -1e-9;
  CHECK(max_abs(expm(nilpotentish) - nilpotentish.exp()) < 1e-12);
  // The fixed-size variant is the same code path.
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = testsupport::random_matrix(gen, 2, 1.2);
    const Eigen::Matrix2cd fixed = expm_fixed2(Eigen::Matrix2cd(a));
    CHECK(max_abs(Matrix(fixed) - expm(a)) == 0.0);
  }
}

TEST_CASE("density operator validation") {
  CHECK_THROWS_AS(DensityOperator::create(Matrix(pauli_x() * 0.5 + kI * pauli_z())),
                  ModelError);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator::create(negative), ModelError);
  Matrix subnormalized = 0.4 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator::create(subnormalized, true), ModelError);
  CHECK_NOTHROW(DensityOperator::create(subnormalized, false));
  CHECK_THROWS_AS(DensityOperator::create(Matrix::Identity(80, 80) / 80.0), ModelError);
}

TEST_CASE("trace distance") {
  CHECK(trace_distance(projector_excited(), projector_ground()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(projector_excited(), projector_excited()) ==
        doctest::Approx(0.0));
}
