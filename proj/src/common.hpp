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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qjt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Central numeric configuration. All tolerance knobs used across the
/// library live here so that a scenario can override them in one place.
struct Tolerances {
  double hermitian = 1e-10;          // max |M - M^dag| entrywise
  double positivity = 1e-10;         // eigenvalue slack for PSD checks
  double trace = 1e-10;              // |tr(rho) - 1| for normalized states
  double channel_completeness = 1e-10;  // sum K^dag K <= 1 + this
  double instrument_normalization = 1e-10;
  double generator_trace = 1e-12;    // |tr L[rho]| for trace conservation
  double quadrature_rel = 1e-6;      // count distributions, remainders
  double mean_state_rel = 1e-8;      // interspersed mean-state quadrature
  double waiting_abs_factor = 1e-10; // bisection tolerance, times time scale
  double tail_detect = 1e-12;        // geometric-grid tail stagnation
  double ep_switch = 1e-8;           // |kappa| <= ep_switch*scale^2 -> series
  double series_term = 1e-16;        // truncation for the entire g+- series
  double jump_feasibility = 1e-12;   // intensity below this is a forbidden jump
  int dim_cap = 64;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

/// Caller passed inconsistent arguments (dimension mismatch, negative time, ...).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// The supplied model violates a structural requirement (positivity,
/// normalization, regime preconditions, ...).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation was called outside the parameter regime it is defined for.
class RegimeError : public ModelError {
 public:
  explicit RegimeError(const std::string& msg) : ModelError(msg) {}
};

/// Observed intensity exceeded the dominating bound during thinning.
class BoundViolationError : public ModelError {
 public:
  explicit BoundViolationError(const std::string& msg) : ModelError(msg) {}
};

/// A replayed trajectory hit a zero-probability jump.
class InfeasibleTrajectoryError : public ModelError {
 public:
  explicit InfeasibleTrajectoryError(const std::string& msg) : ModelError(msg) {}
};

/// Quadrature failed to converge, an exponential overflowed, ...
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A scenario file failed validation; `field` is the offending field path.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace qjt
