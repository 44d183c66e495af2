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

#include <optional>
#include <vector>

#include "octrl/cost.hpp"
#include "octrl/dynamics.hpp"
#include "octrl/optimality.hpp"

namespace octrl {

struct ILQRSettings {
  int max_iterations = 500;
  double convergence_tol = 1e-8;      // relative cost decrease
  double stationarity_tol = 1e-4;     // max_k ||dH/du_k||_inf
  double regularization_init = 0.0;
  double regularization_max = 1e8;
  double line_search_backtrack = 0.5;
  double line_search_min_step = 1e-6;
  TraceCallback trace;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Gains of the update du_k = -k_k - K_k dx_k and the co-state model
/// lambda_k = -v_k - V_k dx_k (v is the value gradient, V its Hessian).
struct BackwardPassResult {
  std::vector<Vector> k;  // feedforward, size m each
  std::vector<Matrix> K;  // feedback, m x n each
  std::vector<Vector> v;  // v_0..v_N
  std::vector<Matrix> V;  // V_0..V_N
};

namespace ilqr {

/**
 * Riccati sweep from V_N = phi_xx, v_N = phi_x(x_N):
 *
 *   M_k = R_uu + B'V_{k+1}B + regularization I
 *   k_k = M_k^{-1} (R_u + B'v_{k+1}),     K_k = M_k^{-1} B'V_{k+1}A
 *   v_k = L_x + A'v_{k+1} - K_k'(R_u + B'v_{k+1})
 *   V_k = L_xx + A'V_{k+1}A - A'V_{k+1}B K_k
 *
 * (the value updates shown for regularization = 0; the regularized sweep uses
 * the exact expansion of the value under the regularized gains).
 *
 * Returns std::nullopt when some M_k is not positive definite.
 */
std::optional<BackwardPassResult> backward_pass(const Trajectory& traj,
                                                const std::vector<DiscreteLinearization>& lin,
                                                const CostQuadratization& quad,
                                                double regularization);

/// L_xx + A'(V^{-1} + B R_uu^{-1} B')^{-1} A. Needs V invertible; agrees with
/// the Riccati-difference update L_xx + A'VA - A'VB(R_uu + B'VB)^{-1}B'VA.
Matrix inverse_form_value_hessian(const Matrix& l_xx, const Matrix& a, const Matrix& b,
                                  const Matrix& r_uu, const Matrix& v_next);

/**
 * Rolls out u_hat_k = u_k - step k_k - K_k (x_hat_k - x_k) from x_hat_0 = x_0.
 * Returns std::nullopt if a non-finite state appears.
 */
std::optional<Trajectory> forward_pass(const ControlAffineSystem& sys, const Trajectory& traj,
                                       const BackwardPassResult& gains, double step);

/// Iterates backward/forward passes with backtracking on the feedforward step.
/// Always returns the best trajectory found; see SolverResult::termination.
SolverResult solve(const ControlAffineSystem& sys, const Cost& cost, const Vector& x0,
                   const std::vector<Vector>& u_init, double dt,
                   const ILQRSettings& settings = {});

}  // namespace ilqr
}  // namespace octrl
