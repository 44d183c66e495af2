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

#include "octrl/optimality.hpp"

#include <algorithm>

namespace octrl {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::line_search_failure: return "line_search_failure";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

std::vector<Vector> discrete_costates(const std::vector<DiscreteLinearization>& lin,
                                      const CostQuadratization& quad) {
  const int N = static_cast<int>(lin.size());
  std::vector<Vector> lambda(N + 1);
  lambda[N] = quad.terminal_gradient;
  for (int k = N - 1; k >= 0; --k) {
    lambda[k] = quad.state_gradient[k] + lin[k].A.transpose() * lambda[k + 1];
  }
  return lambda;
}

double stationarity_residual(const std::vector<DiscreteLinearization>& lin,
                             const CostQuadratization& quad) {
  const std::vector<Vector> lambda = discrete_costates(lin, quad);
  double worst = 0.0;
  for (std::size_t k = 0; k < lin.size(); ++k) {
    const Vector du = quad.control_gradient[k] + lin[k].B.transpose() * lambda[k + 1];
    worst = std::max(worst, du.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

double stationarity_residual(const ControlAffineSystem& sys, const Cost& cost,
                             const Trajectory& traj) {
  return stationarity_residual(linearize_trajectory(sys, traj), quadratize(cost, traj));
}

}  // namespace octrl
