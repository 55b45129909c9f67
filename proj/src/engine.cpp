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

#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ode.hpp"

namespace qjt::engine {

using qops::DensityOperator;
using qops::JumpModel;
using qops::Superoperator;

void Trajectory::validate() const {
  double last = 0.0;
  for (std::size_t j = 0; j < events.size(); ++j) {
    const double tj = events[j].time;
    if (!(tj > last)) {
      throw ArgumentError("Trajectory: jump times must be strictly increasing and > 0");
    }
    last = tj;
  }
  if (!events.empty() && !(events.back().time < horizon)) {
    throw ArgumentError("Trajectory: last jump time must lie before the horizon");
  }
}

namespace {

// Stack-only survival evaluation for two-level pure flows; the sampler
// bisections call this millions of times.
struct FastSurvival2 {
  Eigen::Matrix2cd h_eff;
  Eigen::Matrix2cd rho;
  double operator()(double dt) const {
    const Eigen::Matrix2cd e = qops::expm_fixed2(Eigen::Matrix2cd(-kI * dt * h_eff));
    return (e * rho * e.adjoint()).trace().real();
  }
};

const qops::JumpChannel& find_channel(const JumpModel& model, const std::string& label) {
  for (const auto& jc : model.jump_channels) {
    if (jc.label == label) return jc;
  }
  throw ArgumentError("jump label '" + label + "' not present in model");
}

double trace_real(const Matrix& m) { return m.trace().real(); }

}  // namespace

JumpResult jump_update(const JumpModel& model, const std::string& label,
                       const DensityOperator& rho) {
  const auto& jc = find_channel(model, label);
  if (rho.dim() != model.dim) throw ArgumentError("jump_update: dimension mismatch");
  Matrix mapped = qops::apply_channel(jc.channel, rho.mat);
  const double intensity = trace_real(mapped);
  JumpResult out;
  out.intensity = std::max(intensity, 0.0);
  if (intensity <= default_tolerances().jump_feasibility) {
    out.forbidden = true;
    out.intensity = std::max(intensity, 0.0);
    out.state = rho;
    return out;
  }
  out.state = DensityOperator::create(mapped / intensity, true);
  return out;
}

double survival_probability(const JumpModel& model, const DensityOperator& rho,
                            double dt) {
  if (!(dt >= 0.0)) throw ArgumentError("survival_probability: dt must be >= 0");
  const Superoperator flow = Superoperator::no_jump(model);
  return trace_real(qops::propagate(flow, rho.mat, dt));
}

double waiting_density(const JumpModel& model, const DensityOperator& rho, double dt) {
  if (!(dt >= 0.0)) throw ArgumentError("waiting_density: dt must be >= 0");
  const Superoperator flow = Superoperator::no_jump(model);
  const Matrix evolved = qops::propagate(flow, rho.mat, dt);
  return std::max(trace_real(model.rate_operator * evolved), 0.0);
}

pointproc::SurvivalFunction make_survival(const JumpModel& model,
                                          const DensityOperator& rho) {
  auto flow = std::make_shared<Superoperator>(Superoperator::no_jump(model));
  const Matrix state = rho.mat;
  pointproc::SurvivalFunction surv;
  surv.eval = [flow, state](double dt) {
    return std::clamp(trace_real(qops::propagate(*flow, state, dt)), 0.0, 1.0);
  };
  const double lambda0 = trace_real(model.rate_operator * state);
  surv.time_scale = lambda0 > 1e-300 ? 1.0 / lambda0 : 1.0 / model.total_rate;
  surv.tail = pointproc::estimate_tail(surv.eval, surv.time_scale);
  return surv;
}

std::size_t pick_weighted(const std::vector<double>& weights, double total,
                          pointproc::RngStream& rng) {
  const double x = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (x <= acc) return i;
  }
  if (last_positive == weights.size()) {
    throw NumericError("pick_weighted: no positive weight");
  }
  return last_positive;  // x spilled past acc by roundoff
}

TrajectoryRecord sample_trajectory(const JumpModel& model, const DensityOperator& rho0,
                                   double horizon, pointproc::RngStream& rng) {
  if (!(horizon > 0.0)) throw ArgumentError("sample_trajectory: horizon must be > 0");
  if (!rho0.normalized) throw ArgumentError("sample_trajectory: rho0 must be normalized");
  if (rho0.dim() != model.dim) throw ArgumentError("sample_trajectory: dimension mismatch");

  TrajectoryRecord rec;
  rec.trajectory.horizon = horizon;

  const Superoperator flow = Superoperator::no_jump(model);
  Matrix rho = rho0.mat;
  double t_cur = 0.0;

  try {
    while (true) {
      const double window = horizon - t_cur;
      const Matrix at_end = qops::propagate(flow, rho, window);
      const double s_end = std::clamp(trace_real(at_end), 0.0, 1.0);
      const double u = rng.uniform();
      if (u <= s_end) {
        // No further jump before the horizon.
        rec.states.push_back(DensityOperator::create(at_end / trace_real(at_end), true));
        rec.survival_log += -std::log(s_end);
        break;
      }

      // Invert S(dt) = u on [0, window].
      const double lambda_here = trace_real(model.rate_operator * rho);
      const double scale =
          lambda_here > 1e-300 ? std::min(1.0 / lambda_here, window) : window;
      double lo = 0.0, hi = window;
      const double abs_tol = default_tolerances().waiting_abs_factor * scale;
      if (model.dim == 2 && flow.has_effective_hamiltonian()) {
        const FastSurvival2 fast{flow.effective_hamiltonian(), rho};
        for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
          const double mid = 0.5 * (lo + hi);
          (fast(mid) > u ? lo : hi) = mid;
        }
      } else {
        for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
          const double mid = 0.5 * (lo + hi);
          const double s_mid = trace_real(qops::propagate(flow, rho, mid));
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
      const double pre_trace = trace_real(pre_unnorm);
      if (!(pre_trace > 0.0)) throw NumericError("no-jump trace collapsed to zero");
      const Matrix pre = pre_unnorm / pre_trace;
      rec.survival_log += -std::log(u);

      std::vector<double> weights(model.jump_channels.size());
      double lambda = 0.0;
      for (std::size_t i = 0; i < model.jump_channels.size(); ++i) {
        const auto& jc = model.jump_channels[i];
        weights[i] =
            jc.rate * std::max(trace_real(qops::apply_channel(jc.channel, pre)), 0.0);
        lambda += weights[i];
      }
      if (!(lambda > 0.0)) throw NumericError("jump intensity vanished at a drawn jump");
      const std::size_t pick = pick_weighted(weights, lambda, rng);
      const auto& jc = model.jump_channels[pick];
      const double intensity = weights[pick] / jc.rate;
      const Matrix after = qops::apply_channel(jc.channel, pre) / intensity;

      t_cur += dt;
      rec.trajectory.events.push_back({jc.label, t_cur});
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
  return rec;
}

DensityOperator conditional_state(const JumpModel& model, const DensityOperator& rho0,
                                  const Trajectory& trajectory, double t) {
  trajectory.validate();
  if (!(t >= 0.0) || t > trajectory.horizon) {
    throw ArgumentError("conditional_state: need 0 <= t <= horizon");
  }
  const Superoperator flow = Superoperator::no_jump(model);
  Matrix rho = rho0.mat;
  double t_cur = 0.0;
  for (const auto& ev : trajectory.events) {
    if (ev.time > t) break;
    const Matrix evolved = qops::propagate(flow, rho, ev.time - t_cur);
    const double tr = trace_real(evolved);
    if (!(tr > 0.0)) {
      throw InfeasibleTrajectoryError("conditional_state: no-jump trace vanished");
    }
    const DensityOperator pre = DensityOperator::create(evolved / tr, true);
    const JumpResult jr = jump_update(model, ev.label, pre);
    if (jr.forbidden) {
      throw InfeasibleTrajectoryError("conditional_state: forbidden jump '" + ev.label +
                                      "' at t = " + std::to_string(ev.time));
    }
    rho = jr.state.mat;
    t_cur = ev.time;
  }
  const Matrix evolved = qops::propagate(flow, rho, t - t_cur);
  const double tr = trace_real(evolved);
  if (!(tr > 0.0)) {
    throw InfeasibleTrajectoryError("conditional_state: no-jump trace vanished");
  }
  return DensityOperator::create(evolved / tr, true);
}

double exclusive_density(const JumpModel& model, const DensityOperator& rho0,
                         const Trajectory& trajectory) {
  trajectory.validate();
  const Superoperator flow = Superoperator::no_jump(model);
  Matrix chain = rho0.mat;
  double t_cur = 0.0;
  for (const auto& ev : trajectory.events) {
    chain = qops::propagate(flow, chain, ev.time - t_cur);
    chain = qops::apply_channel(find_channel(model, ev.label).channel, chain);
    t_cur = ev.time;
  }
  chain = qops::propagate(flow, chain, trajectory.horizon - t_cur);
  return trace_real(chain);
}

std::vector<Vector> evolve_cascade(const Matrix& diag_rep, const Matrix& lower_rep,
                                   const std::vector<Vector>& initial, double t,
                                   int block_cap) {
  const Eigen::Index q = diag_rep.rows();
  const Eigen::Index stages = static_cast<Eigen::Index>(initial.size());
  if (stages < 1) throw ArgumentError("evolve_cascade: no stages");
  const Eigen::Index total = q * stages;

  Vector stacked(total);
  for (Eigen::Index s = 0; s < stages; ++s) stacked.segment(s * q, q) = initial[s];

  Vector evolved;
  if (total <= block_cap) {
    Matrix block = Matrix::Zero(total, total);
    for (Eigen::Index s = 0; s < stages; ++s) {
      block.block(s * q, s * q, q, q) = diag_rep;
      if (s > 0) block.block(s * q, (s - 1) * q, q, q) = lower_rep;
    }
    evolved = qops::expm(Matrix(t * block)) * stacked;
  } else {
    auto deriv = [&](const Vector& y) {
      Vector dy(total);
      for (Eigen::Index s = 0; s < stages; ++s) {
        dy.segment(s * q, q) = diag_rep * y.segment(s * q, q);
        if (s > 0) dy.segment(s * q, q) += lower_rep * y.segment((s - 1) * q, q);
      }
      return dy;
    };
    evolved = detail::integrate_rk45(deriv, stacked, t);
  }

  std::vector<Vector> out(static_cast<std::size_t>(stages));
  for (Eigen::Index s = 0; s < stages; ++s) out[s] = evolved.segment(s * q, q);
  return out;
}

CountDistribution count_distribution(const JumpModel& model, const DensityOperator& rho0,
                                     double t, int m_max) {
  if (!(t >= 0.0)) throw ArgumentError("count_distribution: t must be >= 0");
  if (m_max < 0) throw ArgumentError("count_distribution: m_max must be >= 0");

  const Matrix a_rep = Superoperator::no_jump(model).matrix();
  const Matrix g_rep =
      Superoperator::from_apply(model.dim, [&model](const Matrix& rho) {
        return qops::apply_gain(model, rho);
      }).matrix();

  std::vector<Vector> init(static_cast<std::size_t>(m_max) + 1,
                           Vector::Zero(model.dim * model.dim));
  init[0] = qops::vec(rho0.mat);
  const auto stages = evolve_cascade(a_rep, g_rep, init, t);

  CountDistribution out;
  out.probabilities.reserve(stages.size());
  out.event_means.reserve(stages.size());
  double sum = 0.0;
  for (const auto& xi : stages) {
    const Matrix mean = qops::hermitize(qops::unvec(xi, model.dim));
    const double p = std::max(mean.trace().real(), 0.0);
    out.probabilities.push_back(p);
    out.event_means.push_back(mean);
    sum += p;
  }
  if (sum > 1.0 + default_tolerances().quadrature_rel) {
    throw NumericError("count_distribution: probabilities sum beyond 1");
  }
  out.remainder = std::clamp(1.0 - sum, 0.0, 1.0);
  return out;
}

DensityOperator mean_state(const JumpModel& model, const DensityOperator& rho0,
                           double t) {
  if (!(t >= 0.0)) throw ArgumentError("mean_state: t must be >= 0");
  const Superoperator full = Superoperator::full(model);
  const Matrix out = qops::propagate(full, rho0.mat, t);
  return DensityOperator::create(qops::hermitize(out), true);
}

}  // namespace qjt::engine
