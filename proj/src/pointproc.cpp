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

#include "pointproc.hpp"

#include <algorithm>
#include <cmath>

namespace qjt::pointproc {

namespace {
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed & 0xffffffffu),
      static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(stream_index & 0xffffffffu),
      static_cast<std::uint32_t>(stream_index >> 32),
  };
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa shifted into (0,1); never returns an endpoint.
  return (static_cast<double>(engine_() >> 11) + 0.5) * kTwoPowMinus53;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) return kInfiniteTime;
  return -std::log(uniform()) / rate;
}

RenewalLaw RenewalLaw::exponential(double lambda) {
  if (!(lambda > 0.0)) throw ModelError("RenewalLaw: lambda must be > 0");
  RenewalLaw law;
  law.kind = Kind::exponential;
  law.lambda = lambda;
  return law;
}

RenewalLaw RenewalLaw::erlang2(double lambda) {
  if (!(lambda > 0.0)) throw ModelError("RenewalLaw: lambda must be > 0");
  RenewalLaw law;
  law.kind = Kind::erlang2;
  law.lambda = lambda;
  return law;
}

RenewalLaw RenewalLaw::table(const std::vector<double>& times,
                             const std::vector<double>& density,
                             const Tolerances& tol) {
  if (times.size() != density.size() || times.size() < 3) {
    throw ModelError("RenewalLaw: table needs >= 3 matching (t, f) samples");
  }
  if (times.front() != 0.0) throw ModelError("RenewalLaw: table must start at t = 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(density[i])) {
      throw ModelError("RenewalLaw: non-finite table entry");
    }
    if (density[i] < 0.0) throw ModelError("RenewalLaw: density must be >= 0");
    if (i > 0 && times[i] <= times[i - 1]) {
      throw ModelError("RenewalLaw: table times must be strictly increasing");
    }
  }

  RenewalLaw law;
  law.kind = Kind::table;
  law.knots = times;
  law.cdf_values.resize(times.size());
  law.cdf_values[0] = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    law.cdf_values[i] = law.cdf_values[i - 1] +
                        0.5 * (density[i] + density[i - 1]) * (times[i] - times[i - 1]);
  }
  const double total = law.cdf_values.back();
  if (std::abs(total - 1.0) > 1e-8) {
    throw ModelError("RenewalLaw: table density integrates to " +
                     std::to_string(total) + ", expected 1 within 1e-8");
  }

  // Fritsch-Carlson monotone cubic Hermite slopes for the CDF.
  const std::size_t n = times.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (law.cdf_values[i + 1] - law.cdf_values[i]) / (times[i + 1] - times[i]);
  }
  law.cdf_slopes.assign(n, 0.0);
  law.cdf_slopes[0] = secant[0];
  law.cdf_slopes[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    law.cdf_slopes[i] =
        (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      law.cdf_slopes[i] = 0.0;
      law.cdf_slopes[i + 1] = 0.0;
      continue;
    }
    const double a = law.cdf_slopes[i] / secant[i];
    const double b = law.cdf_slopes[i + 1] / secant[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      law.cdf_slopes[i] = tau * a * secant[i];
      law.cdf_slopes[i + 1] = tau * b * secant[i];
    }
  }
  (void)tol;
  return law;
}

namespace {

// Hermite basis evaluation of the table CDF and its derivative.
std::pair<double, double> table_cdf_eval(const RenewalLaw& law, double t) {
  const auto& x = law.knots;
  if (t <= x.front()) return {0.0, law.cdf_slopes.front()};
  // All mass is spent past the last knot; the <= 1e-8 quadrature residue of
  // the tabulated density is absorbed here.
  if (t >= x.back()) return {1.0, 0.0};
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double h = x[i + 1] - x[i];
  const double s = (t - x[i]) / h;
  const double y0 = law.cdf_values[i], y1 = law.cdf_values[i + 1];
  const double m0 = law.cdf_slopes[i] * h, m1 = law.cdf_slopes[i + 1] * h;
  const double s2 = s * s, s3 = s2 * s;
  const double value = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 +
                       (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
  const double deriv = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 +
                        (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) /
                       h;
  return {std::clamp(value, 0.0, 1.0), std::max(deriv, 0.0)};
}

}  // namespace

double RenewalLaw::pdf(double t) const {
  if (t < 0.0) return 0.0;
  switch (kind) {
    case Kind::exponential:
      return lambda * std::exp(-lambda * t);
    case Kind::erlang2:
      return lambda * lambda * t * std::exp(-lambda * t);
    case Kind::table:
      return table_cdf_eval(*this, t).second;
  }
  return 0.0;
}

double RenewalLaw::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind) {
    case Kind::exponential:
      return -std::expm1(-lambda * t);
    case Kind::erlang2:
      return 1.0 - (1.0 + lambda * t) * std::exp(-lambda * t);
    case Kind::table:
      return table_cdf_eval(*this, t).first;
  }
  return 0.0;
}

double RenewalLaw::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::exponential:
      return rng.exponential(lambda);
    case Kind::erlang2:
      // Sum of two independent exponentials, exact.
      return rng.exponential(lambda) + rng.exponential(lambda);
    case Kind::table: {
      const double u = rng.uniform();
      if (u >= cdf_values.back()) return knots.back();
      double lo = 0.0, hi = knots.back();
      for (int iter = 0; iter < 200 && hi - lo > 1e-13 * knots.back(); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (table_cdf_eval(*this, mid).first < u ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return kInfiniteTime;
}

Hazard hazard(const RenewalLaw& law, double t) {
  if (t < 0.0) throw ArgumentError("hazard: t must be >= 0");
  Hazard h;
  switch (law.kind) {
    case RenewalLaw::Kind::exponential: {
      const double surv = std::exp(-law.lambda * t);
      h.density = law.lambda * surv;
      h.cumulative = 1.0 - surv;
      h.rate = law.lambda;
      return h;
    }
    case RenewalLaw::Kind::erlang2: {
      const double surv = (1.0 + law.lambda * t) * std::exp(-law.lambda * t);
      h.density = law.lambda * law.lambda * t * std::exp(-law.lambda * t);
      h.cumulative = 1.0 - surv;
      h.rate = law.lambda * law.lambda * t / (1.0 + law.lambda * t);
      return h;
    }
    case RenewalLaw::Kind::table: {
      const auto [f_cum, f_dens] = table_cdf_eval(law, t);
      h.density = f_dens;
      h.cumulative = f_cum;
      const double surv = 1.0 - f_cum;
      if (surv <= 0.0) {
        h.rate = 0.0;
        h.rate_defined = false;
      } else {
        h.rate = f_dens / surv;
      }
      return h;
    }
  }
  return h;
}

double estimate_tail(const std::function<double(double)>& survival, double time_scale,
                     const Tolerances& tol) {
  double t = std::max(time_scale, 1e-300);
  double last = survival(t);
  int stagnant = 0;
  for (int k = 0; k < 64; ++k) {
    t *= 2.0;
    const double s = survival(t);
    stagnant = (std::abs(s - last) < tol.tail_detect) ? stagnant + 1 : 0;
    last = s;
    if (stagnant >= 2) break;
  }
  return std::clamp(last, 0.0, 1.0);
}

double sample_waiting(const SurvivalFunction& survival, RngStream& rng,
                      const Tolerances& tol) {
  const double u = rng.uniform();
  if (u <= survival.tail) return kInfiniteTime;

  const double scale = survival.time_scale > 0.0 ? survival.time_scale : 1.0;
  double lo = 0.0;
  double s_lo = 1.0;
  double hi = scale;
  double s_hi = survival.eval(hi);
  int doublings = 0;
  while (s_hi > u) {
    if (s_hi > s_lo + 1e-9) {
      throw ModelError("sample_waiting: survival function is not monotone");
    }
    lo = hi;
    s_lo = s_hi;
    hi *= 2.0;
    if (++doublings > 120) return kInfiniteTime;  // indistinguishable from the tail
    s_hi = survival.eval(hi);
  }

  const double abs_tol = tol.waiting_abs_factor * scale;
  for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (survival.eval(mid) > u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double thinning_sample(double intensity_bound,
                       const std::function<double(double)>& intensity_at,
                       RngStream& rng, double horizon) {
  if (intensity_bound < 0.0) throw ArgumentError("thinning_sample: negative bound");
  if (intensity_bound == 0.0) return kInfiniteTime;
  double t = 0.0;
  while (true) {
    t += rng.exponential(intensity_bound);
    if (t > horizon) return kInfiniteTime;
    const double lam = intensity_at(t);
    if (lam > intensity_bound * (1.0 + 1e-9)) {
      throw BoundViolationError("thinning_sample: intensity " + std::to_string(lam) +
                                " exceeds bound " + std::to_string(intensity_bound));
    }
    if (rng.uniform() <= lam / intensity_bound) return t;
  }
}

namespace {

const RenewalLaw& law_for_gap(const std::vector<RenewalLaw>& laws, std::size_t gap) {
  return laws[std::min(gap - 1, laws.size() - 1)];
}

void convolve_next_gap(std::vector<double>& dens, const RenewalLaw& law, double h) {
  const int n = static_cast<int>(dens.size()) - 1;
  std::vector<double> f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = law.pdf(j * h);
  std::vector<double> next(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) {
    double acc = 0.5 * (dens[0] * f[j] + dens[j] * f[0]);
    for (int i = 1; i < j; ++i) acc += dens[i] * f[j - i];
    next[j] = acc * h;
  }
  dens.swap(next);
}

// Grid evaluation of r_m(t): iterated trapezoid convolution of the gap
// densities followed by one CDF-weighted integral.
double tail_remainder_on_grid(const std::vector<RenewalLaw>& laws, int m, double t,
                              int n) {
  const double h = t / n;
  std::vector<double> dens(n + 1);
  const RenewalLaw& first = law_for_gap(laws, 1);
  for (int j = 0; j <= n; ++j) dens[j] = first.pdf(j * h);

  for (int gap = 2; gap <= m + 1; ++gap) {
    convolve_next_gap(dens, law_for_gap(laws, static_cast<std::size_t>(gap)), h);
  }

  const RenewalLaw& last = law_for_gap(laws, static_cast<std::size_t>(m + 2));
  double acc = 0.5 * (dens[0] * last.cdf(t) + dens[n] * last.cdf(0.0));
  for (int j = 1; j < n; ++j) acc += dens[j] * last.cdf(t - j * h);
  return acc * t / n;
}

std::vector<double> renewal_count_pmf_on_grid(const std::vector<RenewalLaw>& laws,
                                              int m_max, double t, int n) {
  const double h = t / n;
  std::vector<double> out;
  out.reserve(m_max + 1);
  out.push_back(law_for_gap(laws, 1).survival(t));
  std::vector<double> dens(n + 1);
  const RenewalLaw& first = law_for_gap(laws, 1);
  for (int j = 0; j <= n; ++j) dens[j] = first.pdf(j * h);
  for (int m = 1; m <= m_max; ++m) {
    // P[N(t) = m] = integral of dens_m(s) (1 - F_{m+1}(t - s)).
    const RenewalLaw& next_law = law_for_gap(laws, static_cast<std::size_t>(m + 1));
    double acc = 0.5 * (dens[0] * next_law.survival(t) + dens[n] * next_law.survival(0.0));
    for (int j = 1; j < n; ++j) acc += dens[j] * next_law.survival(t - j * h);
    out.push_back(acc * h);
    if (m < m_max) convolve_next_gap(dens, next_law, h);
  }
  return out;
}

}  // namespace

double tail_remainder(const std::vector<RenewalLaw>& laws, int m, double t,
                      double rel_tol) {
  if (laws.empty()) throw ArgumentError("tail_remainder: empty law list");
  if (m < 0) throw ArgumentError("tail_remainder: m must be >= 0");
  if (t < 0.0) throw ArgumentError("tail_remainder: t must be >= 0");
  if (t == 0.0) return 0.0;

  // Trapezoid values converge O(h^2); compare their Richardson extrapolants
  // and accept at rel_tol, with a 1e-12 absolute floor for tiny remainders.
  double prev = tail_remainder_on_grid(laws, m, t, 256);
  double prev_ext = 0.0;
  bool have_ext = false;
  for (int n = 512; n <= 8192; n *= 2) {
    const double cur = tail_remainder_on_grid(laws, m, t, n);
    const double ext = (4.0 * cur - prev) / 3.0;
    if (have_ext &&
        std::abs(ext - prev_ext) <= std::max(rel_tol * std::abs(ext), 1e-12)) {
      return std::clamp(ext, 0.0, 1.0);
    }
    prev = cur;
    prev_ext = ext;
    have_ext = true;
  }
  throw NumericError("tail_remainder: quadrature failed to converge");
}

std::vector<double> renewal_count_pmf(const std::vector<RenewalLaw>& laws, int m_max,
                                      double t, double rel_tol) {
  if (laws.empty()) throw ArgumentError("renewal_count_pmf: empty law list");
  if (m_max < 0) throw ArgumentError("renewal_count_pmf: m_max must be >= 0");
  if (t < 0.0) throw ArgumentError("renewal_count_pmf: t must be >= 0");
  if (t == 0.0) {
    std::vector<double> out(m_max + 1, 0.0);
    out[0] = 1.0;
    return out;
  }
  auto worst_gap = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  std::vector<double> prev = renewal_count_pmf_on_grid(laws, m_max, t, 256);
  std::vector<double> prev_ext;
  for (int n = 512; n <= 8192; n *= 2) {
    std::vector<double> cur = renewal_count_pmf_on_grid(laws, m_max, t, n);
    std::vector<double> ext(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) ext[i] = (4.0 * cur[i] - prev[i]) / 3.0;
    if (!prev_ext.empty() && worst_gap(ext, prev_ext) <= std::max(rel_tol, 1e-12)) {
      for (auto& p : ext) p = std::clamp(p, 0.0, 1.0);
      return ext;
    }
    prev = std::move(cur);
    prev_ext = std::move(ext);
  }
  throw NumericError("renewal_count_pmf: quadrature failed to converge");
}

}  // namespace qjt::pointproc
