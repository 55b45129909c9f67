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

#include <variant>

#include "nonhermitian.hpp"
#include "renewal.hpp"
#include "walk.hpp"

namespace qjt::scenario {

struct LawSpec {
  std::string kind;  // "exponential" | "erlang2" | "table"
  double lambda = 1.0;
  std::vector<double> times, density;

  pointproc::RenewalLaw build() const;
};

struct GenericJumpSpec {
  int dim = 2;
  Matrix hamiltonian;
  std::vector<Matrix> lindblads;
  struct Channel {
    std::string label;
    double rate = 1.0;
    std::vector<Matrix> kraus;
  };
  std::vector<Channel> channels;
};

struct EffectiveNhSpec {
  Matrix h_eff;
  std::optional<double> c;  // empty = auto policy
};

struct InterspersedSpec {
  int dim = 2;
  struct StageSpec {
    Matrix hamiltonian;
    std::vector<Matrix> lindblads;
    struct Op {
      std::string label;
      double weight = 1.0;
      std::vector<Matrix> ops;
    };
    std::vector<Op> instrument;
  };
  std::vector<StageSpec> stages;
  std::vector<LawSpec> laws;
};

struct RevivalSpec {
  LawSpec law;
};

struct WalkSpec {
  int dim = 2;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Matrix> vertex_hamiltonians;
  std::vector<std::vector<Matrix>> vertex_lindblads;
  struct Label {
    std::string name;
    double rate = 1.0;
    struct Move {
      int from = 0, to = 0;
      std::vector<Matrix> kraus;
    };
    std::vector<Move> moves;
  };
  std::vector<Label> labels;
};

struct TwoLevelSpec {
  walk::TwoLevelCase which = walk::TwoLevelCase::sigma_z;
  double omega0 = 0.0, omega1 = 0.0;
  double nu0 = 1.0, nu1 = 1.0;
};

using ModelSpec = std::variant<GenericJumpSpec, EffectiveNhSpec, InterspersedSpec,
                               RevivalSpec, WalkSpec, TwoLevelSpec>;

struct GridSpec {
  double t0 = 0.0, t1 = 1.0;
  int steps = 50;
  bool present = false;
};

struct CountsSpec {
  double time = 1.0;
  int m_max = 20;
};

struct TrajectorySpec {
  std::vector<engine::Event> events;
  bool present = false;
};

struct Scenario {
  std::string schema_version = "1";
  ModelSpec model;
  std::string initial_name;               // named state, or empty
  std::optional<Matrix> initial_matrix;   // explicit matrix otherwise
  int initial_vertex = 0;
  double horizon = 1.0;
  std::uint64_t trajectories = 1000;
  std::uint64_t seed = 0;
  GridSpec grid;
  CountsSpec counts;
  TrajectorySpec trajectory;
  std::vector<std::string> outputs;
};

/// Parse a scenario document; throws ValidationError naming the offending
/// field path.
Scenario parse(const std::string& json_text);
Scenario load(const std::string& path);
std::string serialize(const Scenario& scenario);

/// A scenario materialized into module-level models.
struct Built {
  enum class Kind { generic, effective_nh, interspersed, revival, walk };
  Kind kind = Kind::generic;

  std::optional<qops::JumpModel> jump_model;  // generic / effective_nh adapter
  std::optional<nonh::EffectiveHamiltonian> effective;
  std::optional<nonh::C2Params> c2;           // effective_nh, dim 2 only
  std::optional<renewal::InterspersedModel> interspersed;
  std::optional<pointproc::RenewalLaw> revival_law;   // revival kind only
  std::optional<walk::WalkModel> walk_model;

  qops::DensityOperator initial{};
  int initial_vertex = 0;

  /// Jump-model view when one exists (generic, effective_nh, exponential
  /// interspersed, walks via the block embedding); throws otherwise.
  const qops::JumpModel& require_jump_model() const;
  /// Initial state in the space of require_jump_model().
  const qops::DensityOperator& jump_model_initial() const;

  std::optional<qops::JumpModel> embedded;        // walk embedding
  std::optional<qops::DensityOperator> embedded_initial;
};

Built build(const Scenario& scenario);

}  // namespace qjt::scenario
