#include <doctest.h>

#include <cmath>
#include <functional>

#include "reference.hpp"
#include "runops.hpp"
#include "support/oracles.hpp"

using namespace qjt;
using testsupport::max_abs;

namespace {

const char* kIdentityScenario = R"({
  "schema_version": "1",
  "model": {
    "type": "generic_jump",
    "dim": 2,
    "hamiltonian": "zero",
    "jump_channels": [{"label": "tick", "rate": 1.0, "kraus": ["identity"]}]
  },
  "initial_state": "P1",
  "horizon": 1.0,
  "trajectories": 64,
  "seed": 5,
  "counts": {"time": 1.0, "m_max": 18}
})";

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "(no error)";
}

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("well-formed document") {
    const auto s = scenario::parse(kIdentityScenario);
    CHECK(s.horizon == 1.0);
    CHECK(s.trajectories == 64);
    CHECK(s.seed == 5);
    CHECK(s.counts.time == 1.0);
    CHECK(s.counts.m_max == 18);
    const auto built = scenario::build(s);
    CHECK(built.kind == scenario::Built::Kind::generic);
    CHECK(built.jump_model->dim == 2);
    CHECK(built.initial.mat(0, 0).real() == doctest::Approx(1.0));
  }
  SUBCASE("validation errors carry field paths") {
    CHECK(field_of([] { (void)scenario::parse("{"); }) == "(document)");
    CHECK(field_of([] {
            (void)scenario::parse(R"({"schema_version": "1"})");
          }) == ".model");
    CHECK(field_of([] {
            (void)scenario::parse(R"({"schema_version": "2", "model": {}})");
          }) == ".schema_version");
    const char* bad_rate = R"({
      "schema_version": "1",
      "model": {"type": "generic_jump", "dim": 2,
                "jump_channels": [{"label": "a", "rate": -1, "kraus": ["identity"]}]},
      "initial_state": "P1",
      "horizon": 1.0
    })";
    CHECK(field_of([&] { (void)scenario::parse(bad_rate); }) ==
          ".model.jump_channels[0].rate");
    const char* bad_matrix = R"({
      "schema_version": "1",
      "model": {"type": "generic_jump", "dim": 2,
                "jump_channels": [{"label": "a", "rate": 1, "kraus": [[[0,0]]]}]},
      "initial_state": "P1",
      "horizon": 1.0
    })";
    CHECK(field_of([&] { (void)scenario::parse(bad_matrix); }) ==
          ".model.jump_channels[0].kraus[0]");
    const char* bad_horizon = R"({
      "schema_version": "1",
      "model": {"type": "generic_jump", "dim": 2,
                "jump_channels": [{"label": "a", "rate": 1, "kraus": ["identity"]}]},
      "initial_state": "P1",
      "horizon": -2.0
    })";
    CHECK(field_of([&] { (void)scenario::parse(bad_horizon); }) == ".horizon");
  }
  SUBCASE("named states are validated") {
    const char* phi_on_generic = R"({
      "schema_version": "1",
      "model": {"type": "generic_jump", "dim": 2,
                "jump_channels": [{"label": "a", "rate": 1, "kraus": ["identity"]}]},
      "initial_state": "phi0",
      "horizon": 1.0
    })";
    const auto s = scenario::parse(phi_on_generic);
    CHECK(field_of([&] { (void)scenario::build(s); }) == ".initial_state");
  }
  SUBCASE("table laws round trip") {
    std::string text = R"({
      "schema_version": "1",
      "model": {"type": "revival", "law": {"kind": "table",
                "times": [TIMES], "density": [DENS]}},
      "initial_state": "P1",
      "horizon": 1.0
    })";
    std::string times, dens;
    for (int i = 0; i <= 200; ++i) {
      const double x = 2.0 * i / 200.0;
      times += (i ? "," : "") + tables::format_double(x);
      dens += (i ? "," : "") + tables::format_double(x < 1.0 ? x : 2.0 - x);
    }
    text.replace(text.find("TIMES"), 5, times);
    text.replace(text.find("DENS"), 4, dens);
    const auto s1 = scenario::parse(text);
    const auto s2 = scenario::parse(scenario::serialize(s1));
    CHECK(scenario::serialize(s2) == scenario::serialize(s1));
    const auto built = scenario::build(s2);
    CHECK(built.revival_law->cdf(1.0) == doctest::Approx(0.5).epsilon(1e-4));
  }

  SUBCASE("round trip is stable") {
    const auto s1 = scenario::parse(kIdentityScenario);
    const std::string text1 = scenario::serialize(s1);
    const auto s2 = scenario::parse(text1);
    CHECK(scenario::serialize(s2) == text1);
    // And the rebuilt model behaves identically.
    const auto b1 = scenario::build(s1);
    const auto b2 = scenario::build(s2);
    for (double t : {0.3, 0.9}) {
      const double s_a = engine::survival_probability(*b1.jump_model, b1.initial, t);
      const double s_b = engine::survival_probability(*b2.jump_model, b2.initial, t);
      CHECK(s_a == s_b);  // bitwise: the rebuilt model is the same model
    }
  }
}

TEST_CASE("run operations") {
  SUBCASE("counts table is the Poisson pmf plus remainder") {
    const auto s = scenario::parse(kIdentityScenario);
    const auto table = runops::run_counts(s);
    REQUIRE(table.columns == std::vector<std::string>{"quantity", "m", "value"});
    REQUIRE(table.rows.size() == 20);  // m = 0..18 plus the remainder row
    for (int m = 0; m <= 18; ++m) {
      CHECK(std::abs(std::stod(table.rows[m][2]) - testsupport::poisson_pmf(1.0, m)) <
            1e-6);
    }
    CHECK(table.rows.back()[0] == "remainder");
    CHECK(std::stod(table.rows.back()[2]) < 1e-6);
  }
  SUBCASE("simulate output is deterministic and worker independent") {
    const auto s = scenario::parse(kIdentityScenario);
    const auto a = runops::run_simulate(s, 1);
    const auto b = runops::run_simulate(s, 1);
    const auto c = runops::run_simulate(s, 3);
    CHECK(tables::to_csv(a.events) == tables::to_csv(b.events));
    CHECK(tables::to_csv(a.events) == tables::to_csv(c.events));
    CHECK(tables::to_csv(a.states) == tables::to_csv(c.states));
    CHECK(a.events.columns ==
          std::vector<std::string>{"traj_id", "jump_index", "time", "label"});
  }
  SUBCASE("different seeds change the byte stream") {
    auto s = scenario::parse(kIdentityScenario);
    const auto a = runops::run_simulate(s, 1);
    s.seed = 6;
    const auto b = runops::run_simulate(s, 1);
    CHECK(tables::to_csv(a.events) != tables::to_csv(b.events));
  }
  SUBCASE("survival moments for the uniform-rate model") {
    const auto s = scenario::parse(kIdentityScenario);
    const auto [table, summary] = runops::run_survival(s, nullptr);
    CHECK(summary.mean == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(summary.variance == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(summary.tail == doctest::Approx(0.0));
    // Grid rows: default 101 points over [0, horizon].
    CHECK(table.rows.size() == 101);
    CHECK(std::stod(table.rows[0][1]) == doctest::Approx(1.0));
  }
  SUBCASE("exclusive density requires a trajectory") {
    auto s = scenario::parse(kIdentityScenario);
    CHECK_THROWS_AS(runops::run_exclusive(s), ValidationError);
    s.trajectory.present = true;
    s.trajectory.events = {{"tick", 0.25}, {"tick", 0.75}};
    CHECK(runops::run_exclusive(s) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  }
  SUBCASE("empty tables still carry their header") {
    auto s = scenario::parse(kIdentityScenario);
    s.trajectories = 1;
    s.horizon = 1e-9;  // essentially no jumps
    const auto result = runops::run_simulate(s, 1);
    CHECK(tables::to_csv(result.events) == "traj_id,jump_index,time,label\n");
  }
}

TEST_CASE("csv formatting") {
  tables::Table t;
  t.name = "demo";
  t.columns = {"a", "b"};
  t.add_row({tables::format_double(1.0 / 3.0), tables::format_integer(7)});
  CHECK(tables::to_csv(t) == "a,b\n0.33333333333333331,7\n");
  CHECK_THROWS_AS(t.add_row({"only-one"}), ArgumentError);
  // 17 significant digits round-trip exactly.
  const double x = 0.1234567890123456789;
  CHECK(std::stod(tables::format_double(x)) == x);
}
