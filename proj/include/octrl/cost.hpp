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

#include <vector>

#include "octrl/dynamics.hpp"

namespace octrl {

/**
 * Separable objective  J = phi(x_N) + dt * sum_k [ L(x_k) + R(u_k) ].
 *
 * L and R are the continuous-time running integrands; the dt factor is
 * applied by total_cost() and quadratize(). R must be strictly convex.
 */
class Cost {
 public:
  virtual ~Cost() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual double state_cost(const Vector& x) const = 0;
  virtual Vector state_cost_gradient(const Vector& x) const = 0;
  virtual Matrix state_cost_hessian(const Vector& x) const = 0;

  virtual double control_cost(const Vector& u) const = 0;
  virtual Vector control_cost_gradient(const Vector& u) const = 0;
  virtual Matrix control_cost_hessian(const Vector& u) const = 0;

  virtual double terminal_cost(const Vector& x) const = 0;
  virtual Vector terminal_cost_gradient(const Vector& x) const = 0;
  virtual Matrix terminal_cost_hessian(const Vector& x) const = 0;
};

/// L(x) = x'Qx, R(u) = u'Ru, phi(x) = 1/2 x'S_f x.
class QuadraticCost final : public Cost {
 public:
  /// Symmetrizes all three weights. Throws std::invalid_argument unless R is
  /// positive definite and Q, S_f are positive semidefinite.
  QuadraticCost(Matrix q, Matrix r, Matrix s_f);

  /// Diagonal weights: Q = q I_n, R = r I_m, S_f = s_f I_n.
  static QuadraticCost scaled_identity(int n, int m, double q, double r, double s_f);

  int state_dim() const override { return static_cast<int>(q_.rows()); }
  int control_dim() const override { return static_cast<int>(r_.rows()); }

  double state_cost(const Vector& x) const override { return x.dot(q_ * x); }
  Vector state_cost_gradient(const Vector& x) const override { return 2.0 * q_ * x; }
  Matrix state_cost_hessian(const Vector&) const override { return 2.0 * q_; }

  double control_cost(const Vector& u) const override { return u.dot(r_ * u); }
  Vector control_cost_gradient(const Vector& u) const override { return 2.0 * r_ * u; }
  Matrix control_cost_hessian(const Vector&) const override { return 2.0 * r_; }

  double terminal_cost(const Vector& x) const override { return 0.5 * x.dot(s_f_ * x); }
  Vector terminal_cost_gradient(const Vector& x) const override { return s_f_ * x; }
  Matrix terminal_cost_hessian(const Vector&) const override { return s_f_; }

  const Matrix& Q() const { return q_; }
  const Matrix& R() const { return r_; }
  const Matrix& S_f() const { return s_f_; }

 private:
  Matrix q_;
  Matrix r_;
  Matrix s_f_;
};

/**
 * Second-order expansion of the discrete objective around a trajectory.
 * Stage terms already carry the dt factor, e.g. for QuadraticCost
 * state_gradient[k] = 2 dt Q x_k and control_hessian[k] = 2 dt R.
 */
struct CostQuadratization {
  std::vector<Vector> state_gradient;    // L_x, k = 0..N-1
  std::vector<Matrix> state_hessian;     // L_xx
  std::vector<Vector> control_gradient;  // R_u
  std::vector<Matrix> control_hessian;   // R_uu
  Vector terminal_gradient;              // phi_x at x_N
  Matrix terminal_hessian;               // phi_xx at x_N
};

/// phi(x_N) + dt * sum_{k<N} (L(x_k) + R(u_k)).
double total_cost(const Cost& cost, const Trajectory& traj);

CostQuadratization quadratize(const Cost& cost, const Trajectory& traj);

}  // namespace octrl
