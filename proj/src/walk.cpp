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

#include "walk.hpp"

#include <algorithm>
#include <cmath>

#include "ode.hpp"

namespace qjt::walk {

using qops::DensityOperator;
using qops::Superoperator;

Matrix WalkModel::rate_operator(int vertex) const {
  Matrix r = Matrix::Zero(dim, dim);
  for (const auto& label : labels) {
    const auto it = label.kraus.find(vertex);
    if (it == label.kraus.end()) continue;
    for (const auto& j : it->second) r += label.rate * (j.adjoint() * j);
  }
  return qops::hermitize(r);
}

bool WalkModel::absorbing(int vertex) const {
  for (const auto& label : labels) {
    if (label.targets.count(vertex)) return false;
  }
  return true;
}

double RateVector::total_trace() const {
  double sum = 0.0;
  for (const auto& eta : etas) sum += eta.trace().real();
  return sum;
}

WalkModel WalkModel::create(int dim, std::vector<Eigen::VectorXd> vertices,
                            std::vector<Matrix> vertex_hamiltonians,
                            std::vector<std::vector<Matrix>> vertex_lindblads,
                            std::vector<WalkLabel> labels, const Tolerances& tol) {
  const int n = static_cast<int>(vertices.size());
  if (n < 1) throw ModelError("WalkModel: at least one vertex required");
  if (dim < 1 || dim > tol.dim_cap) throw ModelError("WalkModel: bad quantum dimension");
  if (static_cast<int>(vertex_hamiltonians.size()) != n) {
    throw ModelError("WalkModel: one Hamiltonian per vertex required");
  }
  if (vertex_lindblads.empty()) {
    vertex_lindblads.assign(n, {});
  } else if (static_cast<int>(vertex_lindblads.size()) != n) {
    throw ModelError("WalkModel: one Lindblad list per vertex required");
  }
  for (const auto& h : vertex_hamiltonians) {
    if (h.rows() != dim || h.cols() != dim) {
      throw ModelError("WalkModel: vertex Hamiltonian dimension mismatch");
    }
    if (qops::hermiticity_defect(h) > tol.hermitian) {
      throw ModelError("WalkModel: vertex Hamiltonian not Hermitian");
    }
  }
  for (const auto& ls : vertex_lindblads) {
    for (const auto& l : ls) {
      if (l.rows() != dim || l.cols() != dim) {
        throw ModelError("WalkModel: vertex Lindblad dimension mismatch");
      }
    }
  }
  for (const auto& label : labels) {
    if (!(label.rate > 0.0)) {
      throw ModelError("WalkModel: label '" + label.name + "' needs rate > 0");
    }
    for (const auto& [v, target] : label.targets) {
      if (v < 0 || v >= n || target < 0 || target >= n) {
        throw ModelError("WalkModel: label '" + label.name + "' references bad vertex");
      }
      const auto it = label.kraus.find(v);
      if (it == label.kraus.end() || it->second.empty()) {
        throw ModelError("WalkModel: label '" + label.name +
                         "' lacks Kraus operators at an active vertex");
      }
      for (const auto& j : it->second) {
        if (j.rows() != dim || j.cols() != dim) {
          throw ModelError("WalkModel: Kraus dimension mismatch for label '" +
                           label.name + "'");
        }
      }
    }
    for (const auto& [v, ops] : label.kraus) {
      if (!label.targets.count(v)) {
        throw ModelError("WalkModel: label '" + label.name +
                         "' defines Kraus operators outside its active set");
      }
    }
  }

  WalkModel model;
  model.dim = dim;
  model.vertices = std::move(vertices);
  model.vertex_hamiltonians = std::move(vertex_hamiltonians);
  model.vertex_lindblads = std::move(vertex_lindblads);
  model.labels = std::move(labels);
  for (int v = 0; v < n; ++v) {
    if (qops::min_eigenvalue(model.rate_operator(v)) < -tol.positivity) {
      throw ModelError("WalkModel: R(x) lost positivity at vertex " + std::to_string(v));
    }
  }
  return model;
}

Eigen::MatrixXd pauli_rates(const WalkModel& model) {
  const int n = model.n_vertices();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (const auto& label : model.labels) {
    for (const auto& [v, target] : label.targets) t(target, v) += label.rate;
  }
  return t;
}

namespace {

// No-jump generator at a vertex: A_x = L0(x) - {R(x), .}/2.
Superoperator vertex_flow(const WalkModel& model, int vertex) {
  const Matrix r = model.rate_operator(vertex);
  const Matrix& h = model.vertex_hamiltonians[vertex];
  const auto& ls = model.vertex_lindblads[vertex];
  if (ls.empty()) {
    return Superoperator::two_sided(Matrix(h - 0.5 * kI * r));
  }
  Matrix r0 = Matrix::Zero(model.dim, model.dim);
  for (const auto& l : ls) r0 += l.adjoint() * l;
  const Matrix decay = r + r0;
  std::vector<Matrix> lind = ls;
  return Superoperator::from_apply(model.dim, [h, lind, decay](const Matrix& rho) {
    Matrix out = -kI * (h * rho - rho * h);
    for (const auto& l : lind) out += l * rho * l.adjoint();
    out -= 0.5 * (decay * rho + rho * decay);
    return out;
  });
}

Matrix apply_label_channel(const WalkLabel& label, int vertex, const Matrix& rho) {
  const auto it = label.kraus.find(vertex);
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  if (it == label.kraus.end()) return out;
  for (const auto& j : it->second) out += j * rho * j.adjoint();
  return out;
}

// Representations of the coupling T(k,l) and of the vertex flows, stacked.
struct BlockReps {
  int d2 = 0;
  std::vector<Matrix> flow;                    // per vertex, d2 x d2 (A_x)
  std::vector<std::vector<Matrix>> coupling;   // [k][l] = T(k,l) rep or empty
};

BlockReps block_reps(const WalkModel& model) {
  const int n = model.n_vertices();
  BlockReps reps;
  reps.d2 = model.dim * model.dim;
  reps.flow.reserve(n);
  for (int v = 0; v < n; ++v) reps.flow.push_back(vertex_flow(model, v).matrix());
  reps.coupling.assign(n, std::vector<Matrix>(n));
  for (const auto& label : model.labels) {
    for (const auto& [l, k] : label.targets) {
      Matrix rep = Matrix::Zero(reps.d2, reps.d2);
      for (const auto& j : label.kraus.at(l)) {
        rep += qops::sandwich_rep(j, j.adjoint());
      }
      if (reps.coupling[k][l].size() == 0) {
        reps.coupling[k][l] = label.rate * rep;
      } else {
        reps.coupling[k][l] += label.rate * rep;
      }
    }
  }
  return reps;
}

void check_rate_vector(const WalkModel& model, const RateVector& init) {
  if (static_cast<int>(init.etas.size()) != model.n_vertices()) {
    throw ArgumentError("RateVector: one block per vertex required");
  }
  for (const auto& eta : init.etas) {
    if (eta.rows() != model.dim || eta.cols() != model.dim) {
      throw ArgumentError("RateVector: block dimension mismatch");
    }
  }
}

}  // namespace

RateVector lindblad_rate_evolve(const WalkModel& model, const RateVector& init,
                                double t) {
  if (!(t >= 0.0)) throw ArgumentError("lindblad_rate_evolve: t must be >= 0");
  check_rate_vector(model, init);
  const int n = model.n_vertices();
  const int d2 = model.dim * model.dim;
  const int total = n * d2;

  Vector stacked(total);
  for (int v = 0; v < n; ++v) stacked.segment(v * d2, d2) = qops::vec(init.etas[v]);

  const BlockReps reps = block_reps(model);
  Vector evolved;
  if (total <= 4096) {
    Matrix big = Matrix::Zero(total, total);
    for (int k = 0; k < n; ++k) {
      big.block(k * d2, k * d2, d2, d2) = reps.flow[k];
      for (int l = 0; l < n; ++l) {
        if (reps.coupling[k][l].size() != 0) {
          big.block(k * d2, l * d2, d2, d2) += reps.coupling[k][l];
        }
      }
    }
    evolved = qops::expm(Matrix(t * big)) * stacked;
  } else {
    auto deriv = [&](const Vector& y) {
      Vector dy(total);
      for (int k = 0; k < n; ++k) {
        dy.segment(k * d2, d2) = reps.flow[k] * y.segment(k * d2, d2);
        for (int l = 0; l < n; ++l) {
          if (reps.coupling[k][l].size() != 0) {
            dy.segment(k * d2, d2) += reps.coupling[k][l] * y.segment(l * d2, d2);
          }
        }
      }
      return dy;
    };
    evolved = detail::integrate_rk45(deriv, stacked, t);
  }

  RateVector out;
  out.etas.reserve(n);
  for (int v = 0; v < n; ++v) {
    out.etas.push_back(qops::hermitize(qops::unvec(evolved.segment(v * d2, d2), model.dim)));
  }
  const double before = init.total_trace();
  if (std::abs(out.total_trace() - before) > 1e-8 * std::max(1.0, std::abs(before))) {
    throw NumericError("lindblad_rate_evolve: total trace not conserved");
  }
  for (const auto& eta : out.etas) {
    if (qops::min_eigenvalue(eta) < -1e-9) {
      throw NumericError("lindblad_rate_evolve: eta_k lost positivity");
    }
  }
  return out;
}

std::vector<RateVector> lindblad_rate_dyson(const WalkModel& model,
                                            const RateVector& init, double t,
                                            int m_max) {
  if (m_max < 0) throw ArgumentError("lindblad_rate_dyson: m_max must be >= 0");
  check_rate_vector(model, init);
  const int n = model.n_vertices();
  const int d2 = model.dim * model.dim;
  const int q = n * d2;

  const BlockReps reps = block_reps(model);
  Matrix diag = Matrix::Zero(q, q);
  Matrix lower = Matrix::Zero(q, q);
  for (int k = 0; k < n; ++k) {
    diag.block(k * d2, k * d2, d2, d2) = reps.flow[k];
    for (int l = 0; l < n; ++l) {
      if (reps.coupling[k][l].size() != 0) {
        lower.block(k * d2, l * d2, d2, d2) = reps.coupling[k][l];
      }
    }
  }

  std::vector<Vector> initial(static_cast<std::size_t>(m_max) + 1, Vector::Zero(q));
  for (int v = 0; v < n; ++v) initial[0].segment(v * d2, d2) = qops::vec(init.etas[v]);

  const auto stages = engine::evolve_cascade(diag, lower, initial, t);
  std::vector<RateVector> out;
  out.reserve(stages.size());
  for (const auto& stage : stages) {
    RateVector rv;
    for (int v = 0; v < n; ++v) {
      rv.etas.push_back(qops::hermitize(qops::unvec(stage.segment(v * d2, d2), model.dim)));
    }
    out.push_back(std::move(rv));
  }
  return out;
}

HybridRecord simulate_hybrid(const WalkModel& model, const HybridState& init,
                             double horizon, pointproc::RngStream& rng) {
  if (!(horizon > 0.0)) throw ArgumentError("simulate_hybrid: horizon must be > 0");
  if (init.vertex < 0 || init.vertex >= model.n_vertices()) {
    throw ArgumentError("simulate_hybrid: bad initial vertex");
  }
  if (!init.rho.normalized || init.rho.dim() != model.dim) {
    throw ArgumentError("simulate_hybrid: rho must be normalized and match dim");
  }

  HybridRecord rec;
  rec.trajectory.horizon = horizon;

  std::vector<Superoperator> flows;
  flows.reserve(model.n_vertices());
  for (int v = 0; v < model.n_vertices(); ++v) flows.push_back(vertex_flow(model, v));

  int vertex = init.vertex;
  Matrix rho = init.rho.mat;
  double t_cur = 0.0;
  try {
    while (true) {
      const double window = horizon - t_cur;
      const Superoperator& flow = flows[vertex];
      const Matrix at_end = qops::propagate(flow, rho, window);
      const double s_end = std::clamp(at_end.trace().real(), 0.0, 1.0);
      const double u = rng.uniform();
      if (u <= s_end) {
        rec.states.push_back(DensityOperator::create(at_end / at_end.trace().real(), true));
        rec.survival_log += -std::log(s_end);
        break;
      }

      const double lambda0 = (model.rate_operator(vertex) * rho).trace().real();
      const double scale = lambda0 > 1e-300 ? std::min(1.0 / lambda0, window) : window;
      double lo = 0.0, hi = window;
      const double abs_tol = default_tolerances().waiting_abs_factor * scale;
      if (model.dim == 2 && flow.has_effective_hamiltonian()) {
        const Eigen::Matrix2cd h2 = flow.effective_hamiltonian();
        const Eigen::Matrix2cd rho2 = rho;
        for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
          const double mid = 0.5 * (lo + hi);
          const Eigen::Matrix2cd e =
              qops::expm_fixed2(Eigen::Matrix2cd(-kI * mid * h2));
          const double s_mid = (e * rho2 * e.adjoint()).trace().real();
          (s_mid > u ? lo : hi) = mid;
        }
      } else {
        for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
          const double mid = 0.5 * (lo + hi);
          const double s_mid = qops::propagate(flow, rho, mid).trace().real();
          (s_mid > u ? lo : hi) = mid;
        }
      }
      const double dt = 0.5 * (lo + hi);
      if (!(dt < window)) {
        // Bisection collapsed onto the window edge; censor as no jump.
        const Matrix at_horizon = qops::propagate(flow, rho, window);
        rec.states.push_back(
            DensityOperator::create(at_horizon / at_horizon.trace().real(), true));
        rec.survival_log += -std::log(u);
        break;
      }

      const Matrix pre_unnorm = qops::propagate(flow, rho, dt);
      const double pre_trace = pre_unnorm.trace().real();
      if (!(pre_trace > 0.0)) throw NumericError("no-jump trace collapsed to zero");
      const Matrix pre = pre_unnorm / pre_trace;
      rec.survival_log += -std::log(u);

      std::vector<double> weights(model.labels.size(), 0.0);
      double lambda = 0.0;
      for (std::size_t i = 0; i < model.labels.size(); ++i) {
        const auto& label = model.labels[i];
        if (!label.targets.count(vertex)) continue;
        weights[i] = label.rate *
                     std::max(apply_label_channel(label, vertex, pre).trace().real(), 0.0);
        lambda += weights[i];
      }
      if (!(lambda > 0.0)) throw NumericError("jump intensity vanished at a drawn jump");
      const std::size_t pick = engine::pick_weighted(weights, lambda, rng);
      const auto& label = model.labels[pick];
      const double intensity = weights[pick] / label.rate;
      const Matrix after = apply_label_channel(label, vertex, pre) / intensity;

      t_cur += dt;
      vertex = label.targets.at(vertex);
      rec.trajectory.events.push_back({label.name, t_cur});
      rec.vertex_path.push_back(vertex);
      rec.states.push_back(DensityOperator::create(after, true));
      rec.weights.push_back(intensity);
      rho = rec.states.back().mat;
      if (rec.trajectory.events.size() > 10'000'000) {
        throw NumericError("event budget exhausted");
      }
    }
  } catch (const NumericError& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
  } catch (const ModelError& e) {
    // State validation tripping deep in a tail is a numerical degeneracy.
    rec.aborted = true;
    rec.abort_reason = e.what();
  }
  rec.final_vertex = vertex;
  return rec;
}

double vertex_waiting(const WalkModel& model, const HybridState& state, double dt) {
  if (!(dt >= 0.0)) throw ArgumentError("vertex_waiting: dt must be >= 0");
  if (state.vertex < 0 || state.vertex >= model.n_vertices()) {
    throw ArgumentError("vertex_waiting: bad vertex");
  }
  const Superoperator flow = vertex_flow(model, state.vertex);
  return qops::propagate(flow, state.rho.mat, dt).trace().real();
}

HybridState hybrid_state_at(const WalkModel& model, const HybridState& init,
                            const HybridRecord& record, double t) {
  if (!(t >= 0.0) || t > record.trajectory.horizon) {
    throw ArgumentError("hybrid_state_at: t outside [0, horizon]");
  }
  int vertex = init.vertex;
  Matrix rho = init.rho.mat;
  double t_prev = 0.0;
  for (std::size_t j = 0; j < record.trajectory.events.size(); ++j) {
    const auto& ev = record.trajectory.events[j];
    if (ev.time > t) break;
    rho = record.states[j].mat;
    vertex = record.vertex_path[j];
    t_prev = ev.time;
  }
  const Superoperator flow = vertex_flow(model, vertex);
  Matrix evolved = qops::propagate(flow, rho, t - t_prev);
  const double tr = evolved.trace().real();
  if (!(tr > 0.0)) throw NumericError("hybrid_state_at: trace vanished");
  return {vertex, DensityOperator::create(evolved / tr, true)};
}

WalkModel two_level_example(TwoLevelCase which, double omega0, double omega1,
                            double nu0, double nu1) {
  if (!(nu0 > 0.0) || !(nu1 > 0.0)) {
    throw ModelError("two_level_example: nu_k must be > 0");
  }
  if (which == TwoLevelCase::sigma_x && (omega0 == 0.0 || omega1 == 0.0)) {
    throw ModelError("two_level_example: the sigma_x case requires omega_k != 0");
  }
  const Matrix axis = which == TwoLevelCase::sigma_z ? qops::pauli_z() : qops::pauli_x();
  std::vector<Eigen::VectorXd> vertices(2, Eigen::VectorXd::Zero(1));
  vertices[1](0) = 1.0;

  WalkLabel jump;
  jump.name = "jump";
  jump.rate = 1.0;
  jump.targets = {{0, 1}, {1, 0}};
  jump.kraus[0] = {Matrix(std::sqrt(nu0) * qops::sigma_plus())};
  jump.kraus[1] = {Matrix(std::sqrt(nu1) * qops::sigma_minus())};

  return WalkModel::create(
      2, std::move(vertices),
      {Matrix(0.5 * omega0 * axis), Matrix(0.5 * omega1 * axis)}, {}, {std::move(jump)});
}

TwoLevelInfo two_level_info(TwoLevelCase which, double omega0, double omega1,
                            double nu0, double nu1) {
  (void)which;
  TwoLevelInfo info;
  const double omegas[2] = {omega0, omega1};
  const double nus[2] = {nu0, nu1};
  for (int k = 0; k < 2; ++k) {
    info.kappa[k] = 0.25 * (omegas[k] * omegas[k] - 0.25 * nus[k] * nus[k]);
    const double scale = 0.25 * std::max(omegas[k] * omegas[k], nus[k] * nus[k]);
    if (std::abs(info.kappa[k]) <= 1e-12 * std::max(scale, 1e-300)) {
      info.regime[k] = SpectralKind::exceptional;
    } else {
      info.regime[k] =
          info.kappa[k] > 0.0 ? SpectralKind::real_pair : SpectralKind::imaginary_pair;
    }
  }
  return info;
}

qops::JumpModel to_jump_model(const WalkModel& model) {
  const int n = model.n_vertices();
  const int big = n * model.dim;
  Matrix h = Matrix::Zero(big, big);
  std::vector<Matrix> lindblads;
  for (int v = 0; v < n; ++v) {
    h.block(v * model.dim, v * model.dim, model.dim, model.dim) =
        model.vertex_hamiltonians[v];
    for (const auto& l : model.vertex_lindblads[v]) {
      Matrix emb = Matrix::Zero(big, big);
      emb.block(v * model.dim, v * model.dim, model.dim, model.dim) = l;
      lindblads.push_back(std::move(emb));
    }
  }
  std::vector<qops::JumpChannel> channels;
  for (const auto& label : model.labels) {
    std::vector<Matrix> kraus;
    for (const auto& [v, target] : label.targets) {
      for (const auto& j : label.kraus.at(v)) {
        Matrix emb = Matrix::Zero(big, big);
        emb.block(target * model.dim, v * model.dim, model.dim, model.dim) = j;
        kraus.push_back(std::move(emb));
      }
    }
    channels.push_back({label.name, label.rate, qops::QuantumChannel::create(kraus)});
  }
  return qops::JumpModel::create(std::move(h), std::move(lindblads), std::move(channels));
}

qops::DensityOperator embed_state(const WalkModel& model, const HybridState& state) {
  const int big = model.n_vertices() * model.dim;
  Matrix m = Matrix::Zero(big, big);
  m.block(state.vertex * model.dim, state.vertex * model.dim, model.dim, model.dim) =
      state.rho.mat;
  return DensityOperator::create(m, true);
}

RateVector split_blocks(const WalkModel& model, const Matrix& embedded) {
  RateVector out;
  for (int v = 0; v < model.n_vertices(); ++v) {
    out.etas.push_back(
        embedded.block(v * model.dim, v * model.dim, model.dim, model.dim));
  }
  return out;
}

}  // namespace qjt::walk
