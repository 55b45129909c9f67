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

#include <functional>

#include "common.hpp"

namespace qjt::detail {

/// Adaptive Dormand-Prince RK45 for linear stacked systems too large for a
/// block exponential. Embedded error controlled at rtol/atol per component.
Vector integrate_rk45(const std::function<Vector(const Vector&)>& deriv, Vector y0,
                      double t, double rtol = 1e-9, double atol = 1e-12);

/// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 40);

}  // namespace qjt::detail
