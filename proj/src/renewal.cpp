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

#include "renewal.hpp"

#include <algorithm>
#include <cmath>

namespace qjt::renewal {

using qops::DensityOperator;
using qops::Superoperator;

const Stage& InterspersedModel::stage(std::size_t jumps_done) const {
  return stages[std::min(jumps_done, stages.size() - 1)];
}

const pointproc::RenewalLaw& InterspersedModel::law(std::size_t gap) const {
  return laws[std::min(gap - 1, laws.size() - 1)];
}

bool InterspersedModel::trivial_smooth() const {
  for (const auto& s : stages) {
    if (!s.lindblads.empty()) return false;
    if (s.hamiltonian.size() != 0 && s.hamiltonian.cwiseAbs().maxCoeff() > 0.0) {
      return false;
    }
  }
  return true;
}

namespace {

Matrix povm_element(const LabeledOperation& op) {
  Matrix q = Matrix::Zero(op.ops.front().rows(), op.ops.front().cols());
  for (const auto& o : op.ops) q += o.adjoint() * o;
  return op.weight * q;
}

Matrix apply_labeled(const LabeledOperation& op, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& o : op.ops) out += o * rho * o.adjoint();
  return out;
}

Matrix apply_instrument_total(const Stage& stage, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& op : stage.instrument) out += op.weight * apply_labeled(op, rho);
  return out;
}

// Smooth propagator generator of a stage, or nothing when it is trivial.
std::optional<Superoperator> smooth_generator(const Stage& stage, int dim) {
  const bool has_h =
      stage.hamiltonian.size() != 0 && stage.hamiltonian.cwiseAbs().maxCoeff() > 0.0;
  if (!has_h && stage.lindblads.empty()) return std::nullopt;
  if (stage.lindblads.empty()) {
    return Superoperator::two_sided(stage.hamiltonian);
  }
  Matrix h = has_h ? stage.hamiltonian : Matrix::Zero(dim, dim);
  std::vector<Matrix> ls = stage.lindblads;
  Matrix r0 = Matrix::Zero(dim, dim);
  for (const auto& l : ls) r0 += l.adjoint() * l;
  return Superoperator::from_apply(dim, [h, ls, r0](const Matrix& rho) {
    Matrix out = -kI * (h * rho - rho * h);
    for (const auto& l : ls) out += l * rho * l.adjoint();
    out -= 0.5 * (r0 * rho + rho * r0);
    return out;
  });
}

}  // namespace

InterspersedModel build_interspersed(int dim, std::vector<Stage> stages,
                                     std::vector<pointproc::RenewalLaw> laws,
                                     const Tolerances& tol) {
  if (dim < 1 || dim > tol.dim_cap) throw ModelError("build_interspersed: bad dimension");
  if (stages.empty()) throw ModelError("build_interspersed: at least one stage required");
  if (laws.empty()) throw ModelError("build_interspersed: at least one renewal law required");

  for (std::size_t s = 0; s < stages.size(); ++s) {
    auto& stage = stages[s];
    if (stage.hamiltonian.size() == 0) stage.hamiltonian = Matrix::Zero(dim, dim);
    if (stage.hamiltonian.rows() != dim || stage.hamiltonian.cols() != dim) {
      throw ModelError("build_interspersed: stage Hamiltonian dimension mismatch");
    }
    if (qops::hermiticity_defect(stage.hamiltonian) > tol.hermitian) {
      throw ModelError("build_interspersed: stage Hamiltonian not Hermitian");
    }
    for (const auto& l : stage.lindblads) {
      if (l.rows() != dim || l.cols() != dim) {
        throw ModelError("build_interspersed: stage Lindblad dimension mismatch");
      }
    }
    if (stage.instrument.empty()) {
      throw ModelError("build_interspersed: stage instrument is empty");
    }
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto& op : stage.instrument) {
      if (op.ops.empty()) {
        throw ModelError("build_interspersed: label '" + op.label + "' has no operators");
      }
      if (!(op.weight > 0.0)) {
        throw ModelError("build_interspersed: label '" + op.label +
                         "' needs a positive weight");
      }
      for (const auto& o : op.ops) {
        if (o.rows() != dim || o.cols() != dim) {
          throw ModelError("build_interspersed: operator dimension mismatch for label '" +
                           op.label + "'");
        }
      }
      total += povm_element(op);
    }
    const double defect =
        (total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (defect > tol.instrument_normalization) {
      throw ModelError("build_interspersed: stage " + std::to_string(s) +
                       " instrument violates sum nu_u O^dag O = 1 (defect " +
                       std::to_string(defect) + ")");
    }
  }

  InterspersedModel model;
  model.dim = dim;
  model.stages = std::move(stages);
  model.laws = std::move(laws);
  return model;
}

RevivalModel RevivalModel::create(pointproc::RenewalLaw law) {
  Stage stage;
  stage.hamiltonian = Matrix::Zero(2, 2);
  stage.instrument.push_back({"0", 1.0, {qops::sigma_plus()}});
  stage.instrument.push_back({"1", 1.0, {qops::sigma_minus()}});
  RevivalModel out;
  out.law = law;
  out.model = build_interspersed(2, {std::move(stage)}, {std::move(law)});
  return out;
}

engine::TrajectoryRecord simulate_interspersed(const InterspersedModel& model,
                                               const DensityOperator& rho0,
                                               double horizon,
                                               pointproc::RngStream& rng) {
  if (!(horizon > 0.0)) throw ArgumentError("simulate_interspersed: horizon must be > 0");
  if (!rho0.normalized || rho0.dim() != model.dim) {
    throw ArgumentError("simulate_interspersed: rho0 must be normalized and match dim");
  }

  engine::TrajectoryRecord rec;
  rec.trajectory.horizon = horizon;

  std::vector<std::optional<Superoperator>> smooth;
  for (std::size_t s = 0; s < model.stages.size(); ++s) {
    smooth.push_back(smooth_generator(model.stages[s], model.dim));
  }
  auto evolve = [&](std::size_t jumps_done, const Matrix& rho, double dt) {
    const auto& gen = smooth[std::min(jumps_done, smooth.size() - 1)];
    if (!gen || dt == 0.0) return rho;
    Matrix out = qops::propagate(*gen, rho, dt);
    return Matrix(out / out.trace().real());  // trace preserving up to roundoff
  };

  Matrix rho = rho0.mat;
  double t_cur = 0.0;
  std::size_t jumps = 0;
  try {
    while (true) {
      const auto& law = model.law(jumps + 1);
      const double gap = law.sample(rng);
      if (t_cur + gap >= horizon) {
        rho = evolve(jumps, rho, horizon - t_cur);
        rec.states.push_back(DensityOperator::create(rho, true));
        rec.survival_log += -std::log(std::max(law.survival(horizon - t_cur), 1e-300));
        break;
      }
      rho = evolve(jumps, rho, gap);
      rec.survival_log += -std::log(std::max(law.survival(gap), 1e-300));

      const Stage& stage = model.stage(jumps);
      std::vector<double> weights(stage.instrument.size());
      double total = 0.0;
      for (std::size_t i = 0; i < stage.instrument.size(); ++i) {
        weights[i] =
            std::max((povm_element(stage.instrument[i]) * rho).trace().real(), 0.0);
        total += weights[i];
      }
      if (!(total > 0.0)) throw NumericError("label weights vanished at a jump");
      const std::size_t pick = engine::pick_weighted(weights, total, rng);
      const auto& op = stage.instrument[pick];
      const double v = weights[pick] / op.weight;  // V(u,t) = tr{O(u)*[1] rho}
      rho = apply_labeled(op, rho) / v;

      t_cur += gap;
      ++jumps;
      rec.trajectory.events.push_back({op.label, t_cur});
      rec.states.push_back(DensityOperator::create(rho, true));
      rec.weights.push_back(v);
      if (jumps > 10'000'000) throw NumericError("event budget exhausted");
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

double exclusive_density_interspersed(const InterspersedModel& model,
                                      const DensityOperator& rho0,
                                      const engine::Trajectory& trajectory) {
  trajectory.validate();
  std::vector<std::optional<Superoperator>> smooth;
  for (std::size_t s = 0; s < model.stages.size(); ++s) {
    smooth.push_back(smooth_generator(model.stages[s], model.dim));
  }

  Matrix chain = rho0.mat;
  double density = 1.0;
  double t_prev = 0.0;
  std::size_t jumps = 0;
  for (const auto& ev : trajectory.events) {
    const double gap = ev.time - t_prev;
    density *= model.law(jumps + 1).pdf(gap);
    const auto& gen = smooth[std::min(jumps, smooth.size() - 1)];
    if (gen) chain = qops::propagate(*gen, chain, gap);
    const Stage& stage = model.stage(jumps);
    const LabeledOperation* found = nullptr;
    for (const auto& op : stage.instrument) {
      if (op.label == ev.label) {
        found = &op;
        break;
      }
    }
    if (!found) throw ArgumentError("exclusive density: unknown label '" + ev.label + "'");
    chain = apply_labeled(*found, chain);
    t_prev = ev.time;
    ++jumps;
  }
  density *= model.law(jumps + 1).survival(trajectory.horizon - t_prev);
  return density * chain.trace().real();
}

// ---------------------------------------------------------------------------
// Grid evaluator
// ---------------------------------------------------------------------------

struct InterspersedEvaluator::Impl {
  InterspersedModel model;
  Matrix rho0;
  double inner = 0.0;
  double outer = 0.0;
  int m_max = 30;
  bool trivial = true;

  std::vector<std::string> label_names;  // of stage(0), for uniform queries
  std::vector<Matrix> povm;              // Q_u = nu_u sum O^dag O per label
  std::vector<std::optional<Superoperator>> smooth;  // per-stage generators

  struct Run {
    int n = 0;
    int refine = 1;  // 1 for the coarse run, 2 for the fine run
    double h = 0.0;
    // eta[m-1][j] = eta_tilde_m(j h), m = 1..m_max
    std::vector<std::vector<Matrix>> eta;
    std::vector<Matrix> eta_sum;  // sum over m, per node
    // prop[s][k]: dim^2 x dim^2 rep of the stage-s smooth propagator at lag k h
    std::vector<std::vector<Matrix>> prop;
  };
  Run runs[2];

  const Matrix& prop_rep(const Run& run, std::size_t s, int lag) const {
    return run.prop[std::min(s, run.prop.size() - 1)][lag];
  }

  Matrix apply_prop(const Run& run, std::size_t stage_idx, int lag,
                    const Matrix& m) const {
    if (trivial || lag == 0) return m;
    return qops::unvec(prop_rep(run, stage_idx, lag) * qops::vec(m), model.dim);
  }

  // Direct propagation over an off-grid lag (outer partial intervals).
  Matrix apply_prop_time(std::size_t stage_idx, double lag, const Matrix& m) const {
    if (trivial || lag == 0.0) return m;
    const auto& gen = smooth[std::min(stage_idx, smooth.size() - 1)];
    if (!gen) return m;
    return qops::propagate(*gen, m, lag);
  }

  Run build(int n, int refine) const {
    Run run;
    run.n = n;
    run.refine = refine;
    run.h = inner / n;

    if (!trivial) {
      const std::size_t n_stages = model.stages.size();
      run.prop.resize(n_stages);
      for (std::size_t s = 0; s < n_stages; ++s) {
        const auto gen = smooth_generator(model.stages[s], model.dim);
        const int d2 = model.dim * model.dim;
        run.prop[s].resize(n + 1);
        run.prop[s][0] = Matrix::Identity(d2, d2);
        const Matrix step =
            gen ? qops::expm(Matrix(run.h * gen->matrix())) : Matrix::Identity(d2, d2);
        for (int k = 1; k <= n; ++k) run.prop[s][k] = run.prop[s][k - 1] * step;
      }
    }

    run.eta.assign(m_max, std::vector<Matrix>(n + 1, Matrix::Zero(model.dim, model.dim)));

    // eta_tilde_1(t) = f_1(t) Y_1[S_0(t;0)[rho0]]
    {
      const auto& law = model.law(1);
      const Stage& st0 = model.stage(0);
      for (int j = 0; j <= n; ++j) {
        const double f = law.pdf(j * run.h);
        if (f == 0.0) continue;
        run.eta[0][j] = f * apply_instrument_total(st0, apply_prop(run, 0, j, rho0));
      }
    }

    // eta_tilde_m by trapezoid convolution against the previous layer.
    std::vector<double> pdf_table(n + 1);
    for (int m = 2; m <= m_max; ++m) {
      const auto& law = model.law(m);
      for (int k = 0; k <= n; ++k) pdf_table[k] = law.pdf(k * run.h);
      const std::size_t seg_stage = static_cast<std::size_t>(m - 1);
      const Stage& jump_stage = model.stage(seg_stage);
      auto& prev = run.eta[m - 2];
      auto& cur = run.eta[m - 1];
      for (int i = 1; i <= n; ++i) {
        Matrix acc = Matrix::Zero(model.dim, model.dim);
        if (trivial) {
          acc = 0.5 * (pdf_table[i] * prev[0] + pdf_table[0] * prev[i]);
          for (int j = 1; j < i; ++j) acc += pdf_table[i - j] * prev[j];
        } else {
          acc = 0.5 * (pdf_table[i] * apply_prop(run, seg_stage, i, prev[0]) +
                       pdf_table[0] * prev[i]);
          for (int j = 1; j < i; ++j) {
            acc += pdf_table[i - j] * apply_prop(run, seg_stage, i - j, prev[j]);
          }
        }
        cur[i] = run.h * apply_instrument_total(jump_stage, acc);
      }
    }

    run.eta_sum.assign(n + 1, Matrix::Zero(model.dim, model.dim));
    for (int m = 0; m < m_max; ++m) {
      for (int j = 0; j <= n; ++j) run.eta_sum[j] += run.eta[m][j];
    }
    return run;
  }

  int node_index(const Run& run, double t, const char* what) const {
    const double x = t / run.h;
    const int i = static_cast<int>(std::lround(x));
    if (std::abs(x - i) > 1e-6 || i < 0 || i > run.n) {
      throw ArgumentError(std::string(what) + ": time " + std::to_string(t) +
                          " does not lie on the evaluator grid");
    }
    return i;
  }

  Matrix mean_state_run(const Run& run, double t) const {
    const int i = node_index(run, t, "mean_state");
    const auto& law1 = model.law(1);
    Matrix out = law1.survival(t) * apply_prop(run, 0, i, rho0);
    if (i == 0) return out;
    for (int m = 1; m <= m_max; ++m) {
      const auto& law = model.law(m + 1);
      const std::size_t seg_stage = static_cast<std::size_t>(m);
      const auto& eta = run.eta[m - 1];
      Matrix acc = 0.5 * (law.survival(i * run.h) * apply_prop(run, seg_stage, i, eta[0]) +
                          law.survival(0.0) * eta[i]);
      for (int j = 1; j < i; ++j) {
        acc += law.survival((i - j) * run.h) * apply_prop(run, seg_stage, i - j, eta[j]);
      }
      out += run.h * acc;
    }
    return out;
  }

  // W(s) of the one-jump instrument: density (in the last-jump time) of
  // arriving at s with any history in (0, t0), evolved to t0.
  Matrix history_kernel(const Run& run, double t0, double s) const {
    const auto& law = model.law(1);
    const int i0 = node_index(run, t0, "event_probability");
    Matrix out = law.pdf(s) * apply_prop(run, 0, i0, rho0);
    if (i0 == 0) return out;
    const auto& eta = run.eta_sum;
    Matrix acc = 0.5 * (law.pdf(s) * apply_prop(run, 0, i0, eta[0]) +
                        law.pdf(s - t0) * eta[i0]);
    for (int j = 1; j < i0; ++j) {
      acc += law.pdf(s - j * run.h) * apply_prop(run, 0, i0 - j, eta[j]);
    }
    return out + run.h * acc;
  }

  static int outer_nodes(const Run& run, double span) {
    const int base = std::clamp(static_cast<int>(std::ceil(span * 128.0)), 64, 2048);
    return run.refine * base;
  }

  double event_probability_run(const Run& run, const Matrix& q, double t0,
                               double t) const {
    const auto& law = model.law(1);
    const int n2 = outer_nodes(run, t - t0);
    const double h2 = (t - t0) / n2;
    double acc = 0.0;
    for (int a = 0; a <= n2; ++a) {
      const double s = t0 + a * h2;
      const Matrix w = apply_prop_time(0, s - t0, history_kernel(run, t0, s));
      const double val = law.survival(t - s) * (q * w).trace().real();
      acc += (a == 0 || a == n2) ? 0.5 * val : val;
    }
    return acc * h2;
  }

  std::vector<double> first_jump_run(const Run& run, double t0, double t) const {
    const auto& law = model.law(1);
    const int i0 = node_index(run, t0, "first_jump_probabilities");
    const int n2 = outer_nodes(run, t - t0);
    const double h2 = (t - t0) / n2;
    std::vector<double> probs(povm.size(), 0.0);
    for (int a = 0; a <= n2; ++a) {
      const double s = t0 + a * h2;
      // No survival factor: any later jumps are allowed.
      Matrix w = law.pdf(s) * apply_prop_time(0, s, rho0);
      if (i0 > 0) {
        const auto& eta = run.eta_sum;
        Matrix accm = 0.5 * (law.pdf(s) * apply_prop_time(0, s, eta[0]) +
                             law.pdf(s - t0) * apply_prop_time(0, s - t0, eta[i0]));
        for (int j = 1; j < i0; ++j) {
          accm += law.pdf(s - j * run.h) * apply_prop_time(0, s - j * run.h, eta[j]);
        }
        w += run.h * accm;
      }
      const double wt = (a == 0 || a == n2) ? 0.5 : 1.0;
      for (std::size_t u = 0; u < povm.size(); ++u) {
        probs[u] += wt * (povm[u] * w).trace().real();
      }
    }
    for (auto& p : probs) p *= h2;
    return probs;
  }
};

InterspersedEvaluator::InterspersedEvaluator(const InterspersedModel& model,
                                             const DensityOperator& rho0,
                                             double inner_horizon, double outer_horizon,
                                             int m_max, int grid) {
  if (!(inner_horizon >= 0.0) || outer_horizon < inner_horizon) {
    throw ArgumentError("InterspersedEvaluator: need 0 <= inner <= outer horizon");
  }
  impl_ = std::make_unique<Impl>();
  impl_->model = model;
  impl_->rho0 = rho0.mat;
  impl_->inner = inner_horizon > 0.0 ? inner_horizon : outer_horizon;
  impl_->outer = outer_horizon;
  impl_->m_max = m_max;
  impl_->trivial = model.trivial_smooth();
  for (const auto& op : model.stage(0).instrument) {
    impl_->label_names.push_back(op.label);
    impl_->povm.push_back(povm_element(op));
  }
  for (const auto& stage : model.stages) {
    impl_->smooth.push_back(smooth_generator(stage, model.dim));
  }
  if (impl_->inner <= 0.0) {
    throw ArgumentError("InterspersedEvaluator: zero horizon");
  }
  impl_->runs[0] = impl_->build(grid, 1);
  impl_->runs[1] = impl_->build(2 * grid, 2);
}

InterspersedEvaluator::~InterspersedEvaluator() = default;
InterspersedEvaluator::InterspersedEvaluator(InterspersedEvaluator&&) noexcept = default;

const std::vector<std::string>& InterspersedEvaluator::labels() const {
  return impl_->label_names;
}

Matrix InterspersedEvaluator::mean_state(double t) const {
  if (!(t >= 0.0) || t > impl_->inner * (1.0 + 1e-12)) {
    throw ArgumentError("mean_state: t outside the evaluator range");
  }
  const Matrix coarse = impl_->mean_state_run(impl_->runs[0], t);
  const Matrix fine = impl_->mean_state_run(impl_->runs[1], t);
  return qops::hermitize(Matrix((4.0 * fine - coarse) / 3.0));
}

namespace {
void require_uniform(const InterspersedModel& model, const char* what) {
  if (!model.uniform()) {
    throw ModelError(std::string(what) +
                     ": requires a uniform model (single stage, single law)");
  }
}
}  // namespace

double InterspersedEvaluator::event_probability(const std::vector<std::string>& labels,
                                                double t0, double t) const {
  require_uniform(impl_->model, "event_probability");
  if (!(t0 >= 0.0) || !(t > t0)) {
    throw ArgumentError("event_probability: need 0 <= t0 < t");
  }
  Matrix q = Matrix::Zero(impl_->model.dim, impl_->model.dim);
  for (const auto& name : labels) {
    const auto it =
        std::find(impl_->label_names.begin(), impl_->label_names.end(), name);
    if (it == impl_->label_names.end()) {
      throw ArgumentError("event_probability: unknown label '" + name + "'");
    }
    q += impl_->povm[static_cast<std::size_t>(it - impl_->label_names.begin())];
  }
  const double coarse = impl_->event_probability_run(impl_->runs[0], q, t0, t);
  const double fine = impl_->event_probability_run(impl_->runs[1], q, t0, t);
  return (4.0 * fine - coarse) / 3.0;
}

std::vector<double> InterspersedEvaluator::first_jump_probabilities(double t0,
                                                                    double t) const {
  require_uniform(impl_->model, "first_jump_probabilities");
  if (!(t0 >= 0.0) || !(t > t0)) {
    throw ArgumentError("first_jump_probabilities: need 0 <= t0 < t");
  }
  const auto coarse = impl_->first_jump_run(impl_->runs[0], t0, t);
  const auto fine = impl_->first_jump_run(impl_->runs[1], t0, t);
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  }
  return out;
}

double InterspersedEvaluator::total_jump_probability(double t0, double t) const {
  const auto probs = first_jump_probabilities(t0, t);
  double sum = 0.0;
  for (const double p : probs) sum += p;
  return sum;
}

DensityOperator mean_state_interspersed(const InterspersedModel& model,
                                        const DensityOperator& rho0, double t,
                                        int m_max, int grid) {
  if (!(t >= 0.0)) throw ArgumentError("mean_state_interspersed: t must be >= 0");
  if (t == 0.0) return rho0;
  InterspersedEvaluator ev(model, rho0, t, t, m_max, grid);
  Matrix eta = ev.mean_state(t);
  const double remainder = pointproc::tail_remainder(model.laws, std::max(m_max - 1, 0), t);
  const double tr = eta.trace().real();
  if (std::abs(tr - 1.0) > std::max(default_tolerances().mean_state_rel, remainder)) {
    throw NumericError("mean_state_interspersed: trace deficit " +
                       std::to_string(1.0 - tr) + " beyond certified remainder " +
                       std::to_string(remainder));
  }
  return DensityOperator::create(eta / tr, true);
}

double event_probability(const InterspersedModel& model, const DensityOperator& rho0,
                         const std::vector<std::string>& labels, double t0, double t,
                         int m_max, int grid) {
  InterspersedEvaluator ev(model, rho0, t0, t, m_max, grid);
  return ev.event_probability(labels, t0, t);
}

std::pair<double, double> revival_probabilities(const RevivalModel& model,
                                                const DensityOperator& rho0, double t0,
                                                double t, int m_max, int grid) {
  if (!(t0 >= 0.0) || !(t > t0)) {
    throw ArgumentError("revival_probabilities: need 0 <= t0 < t");
  }
  InterspersedEvaluator ev(model.model, rho0, t0, t, m_max, grid);
  const auto probs = ev.first_jump_probabilities(t0, t);
  return {probs[0], probs[1]};
}

Distances distances(const RevivalModel& model, double t0, double t, int m_max,
                    int grid) {
  const auto rho_g = reference_state_ground();
  const auto rho_e = reference_state_excited();
  Distances out;
  if (t0 > 0.0) {
    // One evaluator per initial state serves both the first-jump
    // probabilities and the mean state at t0.
    InterspersedEvaluator ev_g(model.model, rho_g, t0, t, m_max, grid);
    InterspersedEvaluator ev_e(model.model, rho_e, t0, t, m_max, grid);
    const auto pg = ev_g.first_jump_probabilities(t0, t);
    const auto pe = ev_e.first_jump_probabilities(t0, t);
    out.kolmogorov = 0.5 * std::abs(pg[0] - pe[0]) + 0.5 * std::abs(pg[1] - pe[1]);
    out.trace = qops::trace_distance(ev_g.mean_state(t0), ev_e.mean_state(t0));
  } else {
    const auto [p0_g, p1_g] = revival_probabilities(model, rho_g, t0, t, m_max, grid);
    const auto [p0_e, p1_e] = revival_probabilities(model, rho_e, t0, t, m_max, grid);
    out.kolmogorov = 0.5 * std::abs(p0_g - p0_e) + 0.5 * std::abs(p1_g - p1_e);
    out.trace = qops::trace_distance(rho_g.mat, rho_e.mat);
  }
  return out;
}

DensityOperator reference_state_ground() {
  return DensityOperator::create(qops::projector_ground(), true);
}

DensityOperator reference_state_excited() {
  return DensityOperator::create(qops::projector_excited(), true);
}

qops::JumpModel to_jump_model(const InterspersedModel& model) {
  if (!model.uniform()) {
    throw ModelError("to_jump_model: requires a uniform model");
  }
  const auto& law = model.law(1);
  if (law.kind != pointproc::RenewalLaw::Kind::exponential) {
    throw ModelError("to_jump_model: only the exponential law has constant hazard");
  }
  const double lambda = law.lambda;
  const Stage& st = model.stage(0);
  std::vector<qops::JumpChannel> channels;
  for (const auto& op : st.instrument) {
    std::vector<Matrix> kraus;
    for (const auto& o : op.ops) kraus.push_back(Matrix(std::sqrt(lambda) * o));
    try {
      channels.push_back({op.label, op.weight, qops::QuantumChannel::create(kraus)});
    } catch (const ModelError&) {
      throw ModelError(
          "to_jump_model: sqrt(lambda) O_j('" + op.label +
          "') is trace increasing; the adapter needs lambda |sum O^dag O| <= 1");
    }
  }
  Matrix h = st.hamiltonian.size() != 0 ? st.hamiltonian
                                        : Matrix::Zero(model.dim, model.dim);
  return qops::JumpModel::create(h, st.lindblads, std::move(channels));
}

}  // namespace qjt::renewal
