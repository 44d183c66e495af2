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

/**
 * Equality-constrained QP over the stacked step
 *
 *   z = [dx_1, ..., dx_N, du_0, ..., du_{N-1}]      (size D = nN + mN)
 *
 *   min  g'z + 1/2 z'Hz    s.t.  C z = -r
 *
 * Row block k of C encodes dx_{k+1} - A_k dx_k - B_k du_k (dx_0 = 0), and
 * r_k = x_{k+1} - euler_step(x_k, u_k) is the current dynamics defect.
 */
struct QPSubproblem {
  int state_dim = 0;
  int control_dim = 0;
  int horizon = 0;
  Matrix H;  // D x D, block diagonal
  Vector g;  // D
  Matrix C;  // nN x D
  Vector r;  // nN

  int num_variables() const { return (state_dim + control_dim) * horizon; }
  int num_constraints() const { return state_dim * horizon; }
  /// Offset of dx_k (k = 1..N) in z.
  int state_offset(int k) const { return (k - 1) * state_dim; }
  /// Offset of du_k (k = 0..N-1) in z.
  int control_offset(int k) const { return state_dim * horizon + k * control_dim; }
};

struct QPSolution {
  Vector step;         // z
  Vector multipliers;  // mu, one block per dynamics constraint
  double kkt_residual = 0.0;
};

struct SQPSettings {
  int max_iterations = 200;
  double kkt_tol = 1e-6;
  double stationarity_tol = 1e-4;  // checked on the re-rolled trajectory
  double merit_penalty_init = 10.0;
  double line_search_backtrack = 0.5;
  double line_search_min_step = 1e-6;
  double armijo = 1e-4;
  TraceCallback trace;

  void validate() const;
};

namespace sqp {

/// Cost quadratization and dynamics linearization along `traj`, which need not
/// be feasible.
QPSubproblem build_qp(const ControlAffineSystem& sys, const Cost& cost, const Trajectory& traj);

/**
 * Solves [H C'; C 0][z; mu] = [-g; -r] by a dense LU factorization of the full
 * (D + nN)-square KKT matrix. The band structure is deliberately ignored so
 * the cost per iteration grows cubically in N.
 *
 * Returns std::nullopt if the KKT matrix is numerically singular.
 */
std::optional<QPSolution> solve_eq_qp(const QPSubproblem& qp);

/**
 * KKT residual of the transcribed NLP at `traj`:
 * max(stationarity residual with least-squares multipliers, max defect).
 */
double kkt_residual(const ControlAffineSystem& sys, const Cost& cost, const Trajectory& traj);

/**
 * Full-space SQP from (x_init, u_init) with an l1 merit line search. x_init[0]
 * is replaced by x0. The reported trajectory is re-rolled through the
 * dynamics from the final controls.
 */
SolverResult solve(const ControlAffineSystem& sys, const Cost& cost, const Vector& x0,
                   const std::vector<Vector>& x_init, const std::vector<Vector>& u_init,
                   double dt, const SQPSettings& settings = {});

}  // namespace sqp
}  // namespace octrl
