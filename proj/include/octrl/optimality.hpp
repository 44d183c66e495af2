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
#include <limits>
#include <string_view>
#include <vector>

#include "octrl/cost.hpp"
#include "octrl/dynamics.hpp"

namespace octrl {

enum class Termination { converged, max_iterations, line_search_failure, numerical_failure };

std::string_view to_string(Termination t);

/// Output shared by the iLQR and SQP solvers.
struct SolverResult {
  Trajectory trajectory;  // dynamically feasible
  double cost = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  Termination termination = Termination::numerical_failure;
  /// max_k ||dH_k/du_k||_inf along `trajectory`.
  double stationarity_residual = std::numeric_limits<double>::quiet_NaN();
};

/// One row of a per-iteration solver trace. Fields a solver does not use are NaN.
struct IterationRecord {
  int iteration = 0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  double merit = std::numeric_limits<double>::quiet_NaN();
  double step = std::numeric_limits<double>::quiet_NaN();
  double regularization = std::numeric_limits<double>::quiet_NaN();
  double penalty = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
};

using TraceCallback = std::function<void(const IterationRecord&)>;

/**
 * Discrete co-states of the Euler-transcribed problem:
 *   lambda_N = phi_x(x_N),   lambda_k = L_x(k) + A_k' lambda_{k+1}.
 * On a feasible trajectory lambda_{k+1} is the multiplier of the k-th dynamics
 * constraint (up to sign) and R_u(k) + B_k' lambda_{k+1} is dJ/du_k.
 */
std::vector<Vector> discrete_costates(const std::vector<DiscreteLinearization>& lin,
                                      const CostQuadratization& quad);

/// max_k ||R_u(k) + B_k' lambda_{k+1}||_inf, the discrete form of dH/du = 0.
double stationarity_residual(const std::vector<DiscreteLinearization>& lin,
                             const CostQuadratization& quad);

double stationarity_residual(const ControlAffineSystem& sys, const Cost& cost,
                             const Trajectory& traj);

}  // namespace octrl
