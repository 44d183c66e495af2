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

#include "octrl/cost.hpp"

#include <stdexcept>
#include <string>

namespace octrl {

namespace {

Matrix symmetrized(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + " must be square and non-empty");
  }
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
  return 0.5 * (m + m.transpose());
}

void require_psd(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument(std::string(what) + " must be positive semidefinite");
  }
}

void check_shape(const Cost& cost, const Trajectory& traj) {
  if (traj.states.size() != traj.controls.size() + 1) {
    throw std::invalid_argument("trajectory: need exactly one more state than controls");
  }
  for (const Vector& x : traj.states) {
    if (x.size() != cost.state_dim()) throw std::invalid_argument("cost: state dimension mismatch");
  }
  for (const Vector& u : traj.controls) {
    if (u.size() != cost.control_dim()) {
      throw std::invalid_argument("cost: control dimension mismatch");
    }
  }
}

}  // namespace

QuadraticCost::QuadraticCost(Matrix q, Matrix r, Matrix s_f)
    : q_(symmetrized(q, "Q")), r_(symmetrized(r, "R")), s_f_(symmetrized(s_f, "S_f")) {
  if (q_.rows() != s_f_.rows()) throw std::invalid_argument("Q and S_f sizes differ");
  require_psd(q_, "Q");
  require_psd(s_f_, "S_f");
  if (Eigen::LLT<Matrix>(r_).info() != Eigen::Success) {
    throw std::invalid_argument("R must be positive definite");
  }
}

QuadraticCost QuadraticCost::scaled_identity(int n, int m, double q, double r, double s_f) {
  return QuadraticCost(q * Matrix::Identity(n, n), r * Matrix::Identity(m, m),
                       s_f * Matrix::Identity(n, n));
}

double total_cost(const Cost& cost, const Trajectory& traj) {
  check_shape(cost, traj);
  double running = 0.0;
  for (int k = 0; k < traj.horizon(); ++k) {
    running += cost.state_cost(traj.states[k]) + cost.control_cost(traj.controls[k]);
  }
  return cost.terminal_cost(traj.states.back()) + traj.dt * running;
}

CostQuadratization quadratize(const Cost& cost, const Trajectory& traj) {
  check_shape(cost, traj);
  const int N = traj.horizon();
  const double dt = traj.dt;
  CostQuadratization q;
  q.state_gradient.reserve(N);
  q.state_hessian.reserve(N);
  q.control_gradient.reserve(N);
  q.control_hessian.reserve(N);
  for (int k = 0; k < N; ++k) {
    q.state_gradient.push_back(dt * cost.state_cost_gradient(traj.states[k]));
    q.state_hessian.push_back(dt * cost.state_cost_hessian(traj.states[k]));
    q.control_gradient.push_back(dt * cost.control_cost_gradient(traj.controls[k]));
    q.control_hessian.push_back(dt * cost.control_cost_hessian(traj.controls[k]));
  }
  q.terminal_gradient = cost.terminal_cost_gradient(traj.states.back());
  q.terminal_hessian = cost.terminal_cost_hessian(traj.states.back());
  return q;
}

}  // namespace octrl
