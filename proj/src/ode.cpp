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

#include "ode.hpp"

#include <cmath>

namespace qjt::detail {

Vector integrate_rk45(const std::function<Vector(const Vector&)>& deriv, Vector y0,
                      double t, double rtol, double atol) {
  if (t < 0.0) throw ArgumentError("integrate_rk45: t must be >= 0");
  if (t == 0.0) return y0;

  // Dormand-Prince coefficients.
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double s = 0.0;
  double h = t / 16.0;
  Vector y = std::move(y0);
  Vector k1 = deriv(y);
  int steps = 0;
  while (s < t) {
    if (++steps > 2'000'000) throw NumericError("integrate_rk45: too many steps");
    h = std::min(h, t - s);
    const Vector k2 = deriv(y + h * (a21 * k1));
    const Vector k3 = deriv(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = deriv(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = deriv(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 =
        deriv(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = deriv(y5);
    const Vector err_vec =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
      err = std::max(err, std::abs(err_vec(i)) / sc);
    }
    if (err <= 1.0) {
      s += h;
      y = y5;
      k1 = k7;  // FSAL
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    h *= factor;
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw NumericError("integrate_rk45: step size collapsed");
    }
  }
  return y;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  struct Impl {
    const std::function<double(double)>& f;
    int max_depth;
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
      }
      return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  if (!(b >= a)) throw ArgumentError("adaptive_simpson: b must be >= a");
  if (a == b) return 0.0;
  Impl impl{f, max_depth};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
}

}  // namespace qjt::detail
