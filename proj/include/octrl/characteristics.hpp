/*
 Copyright 2026 The octrl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Scalar-state minimum-principle machinery:
//
//   min  phi(x(t_f)) + int_0^t_f [ l(x) + R(u) ] dt,   xdot = f(x) + g(x) u
//
// With R strictly convex the stationarity condition R_u(u) + lambda g(x) = 0
// has the unique solution u = Psi(lambda g(x)), and the state/co-state pair
// obeys the characteristic system
//
//   xdot      = f + g Psi(lambda g)
//   lambdadot = -l_x - lambda f_x - lambda g_x Psi(lambda g)
//
// integrated backwards from (x_tf, phi_x(x_tf)).

namespace octrl::characteristics {

using ScalarFn = std::function<double(double)>;

struct ScalarSystem {
  ScalarFn f, f_x;
  ScalarFn g, g_x;
  ScalarFn l, l_x;
  ScalarFn phi, phi_x;
  ScalarFn R, R_u, R_uu;  // control cost, strictly convex
};

/// f = a x, g = b, l = q x^2, R = 1/2 r u^2, phi = 1/2 s_f x^2.
ScalarSystem scalar_lqr(double a, double b, double q, double r, double s_f);

/// f = a sin x, g = b, l = q x^2, R = r u^2, phi = 1/2 s_f x^2.
ScalarSystem sine_system(double a, double b, double q, double r, double s_f);

/// Thrown by psi() when no control satisfies R_u(u) = -z.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The unique u with R_u(u) = -z, by bracketed Newton iteration.
double psi(const ScalarSystem& sys, double z);

struct CharacteristicCurve {
  bool ok = true;
  /// Earliest time the backward integration reached; 0 on success.
  double reached_time = 0.0;
  // Ascending time grid over [0, t_f] (over [reached_time, t_f] on failure).
  std::vector<double> time;
  std::vector<double> state;
  std::vector<double> costate;
  std::vector<double> control;

  double initial_state() const { return state.front(); }
  double initial_costate() const { return costate.front(); }
};

/// Fixed-step RK4 from t_f down to 0 starting at (x_tf, phi_x(x_tf)). The step
/// is t_f / ceil(t_f / dt_int). Stops with ok = false at the first non-finite value.
CharacteristicCurve integrate_characteristics_backward(const ScalarSystem& sys, double x_tf,
                                                       double t_f, double dt_int);

struct ShootingOptions {
  double search_half_width = 10.0;  // scan x_tf over [x0 - w, x0 + w]
  int scan_points = 201;
  double terminal_tol = 1e-14;      // x_tf bracket width at which refinement stops
};

struct ShootingResult {
  bool found = false;
  double x_tf = 0.0;
  CharacteristicCurve curve;
  /// Every terminal state whose characteristic reaches x0 (one per bracket).
  std::vector<double> roots;
};

/// Finds x_tf whose backward characteristic passes through x0 at t = 0.
/// found = false (not an exception) when the scan brackets no root.
ShootingResult solve_tpbvp_shooting(const ScalarSystem& sys, double x0, double t_f,
                                    double dt_int, const ShootingOptions& options = {});

struct UniquenessRow {
  double x_tf;
  double x0;       // x(0) of the backward characteristic, NaN on blow-up
  double lambda0;  // lambda(0), NaN on blow-up
  bool ok;
};

struct UniquenessReport {
  std::vector<UniquenessRow> rows;
  bool monotone = true;
  /// Sign changes of x(0) - x0 across the grid.
  int brackets = 0;
  std::string violation;  // empty when monotone
};

/// Backward characteristics from every grid point; checks that x_tf -> x(0)
/// is strictly monotone (so at most one characteristic passes through x0).
UniquenessReport verify_uniqueness(const ScalarSystem& sys, double x0, double t_f,
                                   const std::vector<double>& terminal_grid, double dt_int);

/// max over the curve of |R_u(u) + lambda g(x)|.
double stationarity_residual(const ScalarSystem& sys, const CharacteristicCurve& curve);

}  // namespace octrl::characteristics
