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

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "common.hpp"

namespace qjt::pointproc {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Deterministic per-trajectory random stream. Keyed by
/// (master_seed, stream_index) so trajectory i reproduces bit-identically
/// no matter which worker runs it. Raw engine output is converted to
/// uniforms in-house; std::uniform_real_distribution is implementation
/// defined and would break cross-platform determinism.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform draw in the open interval (0, 1).
  double uniform();
  /// Exponential waiting time with the given rate.
  double exponential(double rate);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

/// Waiting-time distribution between consecutive jumps.
struct RenewalLaw {
  enum class Kind { exponential, erlang2, table };

  Kind kind = Kind::exponential;
  double lambda = 1.0;

  // table kind: CDF knots with a monotone cubic Hermite interpolant.
  std::vector<double> knots;
  std::vector<double> cdf_values;
  std::vector<double> cdf_slopes;

  static RenewalLaw exponential(double lambda);
  static RenewalLaw erlang2(double lambda);
  static RenewalLaw table(const std::vector<double>& times,
                          const std::vector<double>& density,
                          const Tolerances& tol = default_tolerances());

  double pdf(double t) const;
  double cdf(double t) const;
  double survival(double t) const { return 1.0 - cdf(t); }
  /// Exact inverse-CDF draw for exponential/erlang2, numeric inverse for tables.
  double sample(RngStream& rng) const;
};

struct Hazard {
  double density = 0.0;      // f(t)
  double cumulative = 0.0;   // F(t)
  double rate = 0.0;         // h(t) = f/(1-F)
  bool rate_defined = true;  // false once F(t) = 1
};

Hazard hazard(const RenewalLaw& law, double t);

/// Monotone nonincreasing survival S(t) with S(0) = 1; `tail` caches
/// S(infinity) and `time_scale` sets the bisection resolution.
struct SurvivalFunction {
  std::function<double(double)> eval;
  double tail = 0.0;
  double time_scale = 1.0;
};

/// Estimate S(infinity) on a geometric time grid: double t until two
/// consecutive increments stagnate below tol.tail_detect.
double estimate_tail(const std::function<double(double)>& survival, double time_scale,
                     const Tolerances& tol = default_tolerances());

/// Inverse-CDF draw from a survival function: U uniform, +infinity when
/// U <= tail, otherwise the unique t with S(t) = U found by bracketing
/// plus bisection to absolute tolerance waiting_abs_factor * time_scale.
double sample_waiting(const SurvivalFunction& survival, RngStream& rng,
                      const Tolerances& tol = default_tolerances());

/// Accept/reject sampling of the first point of an inhomogeneous process
/// dominated by a constant-rate Poisson stream; +infinity past the horizon.
double thinning_sample(double intensity_bound,
                       const std::function<double(double)>& intensity_at,
                       RngStream& rng, double horizon);

/// Truncation remainder r_m(t) = P[at least m+2 renewals by t] for the gap
/// laws f_1, f_2, ... (the last law repeats when the list is shorter).
/// Grid convolutions with Richardson refinement down to rel_tol.
double tail_remainder(const std::vector<RenewalLaw>& laws, int m, double t,
                      double rel_tol = 1e-6);

/// P[N(t) = m] for m = 0..m_max under the renewal process with the given gap
/// laws; same convolution machinery as tail_remainder.
std::vector<double> renewal_count_pmf(const std::vector<RenewalLaw>& laws, int m_max,
                                      double t, double rel_tol = 1e-6);

}  // namespace qjt::pointproc
