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

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace octrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * Continuous-time control-affine dynamics  xdot = f(x) + G(x) u.
 *
 * Implementations must be immutable after construction; every method is a
 * pure function of its arguments so a model can be shared across threads.
 */
class ControlAffineSystem {
 public:
  virtual ~ControlAffineSystem() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  /// f(x), size n.
  virtual Vector drift(const Vector& x) const = 0;
  /// G(x), size n x m.
  virtual Matrix input_matrix(const Vector& x) const = 0;
  /// df/dx, size n x n.
  virtual Matrix drift_jacobian(const Vector& x) const = 0;
  /// d(G(x) u)/dx for fixed u, size n x n.
  virtual Matrix input_matrix_jacobian(const Vector& x, const Vector& u) const = 0;
};

/**
 * Point-mass pendulum on a massless rod, actuated by a torque at the pivot.
 *
 * State [theta, omega] with theta = 0 upright and theta = pi hanging:
 *
 *   theta_ddot = (g / l) sin(theta) + u / (m l^2)
 */
class PendulumModel final : public ControlAffineSystem {
 public:
  struct Params {
    double rod_length = 0.5;
    double mass = 0.5;
    double gravity = 9.81;
  };

  PendulumModel() : PendulumModel(Params{}) {}
  explicit PendulumModel(const Params& params);

  std::string name() const override { return "pendulum"; }
  int state_dim() const override { return 2; }
  int control_dim() const override { return 1; }
  Vector drift(const Vector& x) const override;
  Matrix input_matrix(const Vector& x) const override;
  Matrix drift_jacobian(const Vector& x) const override;
  Matrix input_matrix_jacobian(const Vector& x, const Vector& u) const override;

  const Params& params() const { return params_; }

 private:
  Params params_;
};

/**
 * Cart-pole with a horizontal force on the cart and a point mass at the tip
 * of the pole. State [p, p_dot, theta, theta_dot], theta = 0 upright, the
 * pole tip sits at (p + l sin(theta), l cos(theta)). With
 * d = m_c + m_p sin^2(theta):
 *
 *   p_ddot     = (u + m_p sin(theta) (l theta_dot^2 - g cos(theta))) / d
 *   theta_ddot = ((m_c + m_p) g sin(theta) - m_p l theta_dot^2 sin(theta) cos(theta)
 *                 - u cos(theta)) / (l d)
 */
class CartpoleModel final : public ControlAffineSystem {
 public:
  struct Params {
    double cart_mass = 1.0;
    double pole_mass = 0.01;
    double pole_length = 0.6;
    double gravity = 9.81;
  };

  CartpoleModel() : CartpoleModel(Params{}) {}
  explicit CartpoleModel(const Params& params);

  std::string name() const override { return "cartpole"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }
  Vector drift(const Vector& x) const override;
  Matrix input_matrix(const Vector& x) const override;
  Matrix drift_jacobian(const Vector& x) const override;
  Matrix input_matrix_jacobian(const Vector& x, const Vector& u) const override;

  const Params& params() const { return params_; }

 private:
  Params params_;
};

/// xdot = a sin(x) + b u. One-dimensional test bed for the scalar theory.
class ScalarSineModel final : public ControlAffineSystem {
 public:
  struct Params {
    double drift_gain = 1.0;
    double input_gain = 1.0;
  };

  ScalarSineModel() : ScalarSineModel(Params{}) {}
  explicit ScalarSineModel(const Params& params) : params_(params) {}

  std::string name() const override { return "scalar-custom"; }
  int state_dim() const override { return 1; }
  int control_dim() const override { return 1; }
  Vector drift(const Vector& x) const override;
  Matrix input_matrix(const Vector& x) const override;
  Matrix drift_jacobian(const Vector& x) const override;
  Matrix input_matrix_jacobian(const Vector& x, const Vector& u) const override;

  const Params& params() const { return params_; }

 private:
  Params params_;
};

/// xdot = A x + B u.
class LinearSystem final : public ControlAffineSystem {
 public:
  LinearSystem(Matrix a, Matrix b);

  std::string name() const override { return "linear"; }
  int state_dim() const override { return static_cast<int>(a_.rows()); }
  int control_dim() const override { return static_cast<int>(b_.cols()); }
  Vector drift(const Vector& x) const override { return a_ * x; }
  Matrix input_matrix(const Vector&) const override { return b_; }
  Matrix drift_jacobian(const Vector&) const override { return a_; }
  Matrix input_matrix_jacobian(const Vector&, const Vector&) const override {
    return Matrix::Zero(a_.rows(), a_.rows());
  }

 private:
  Matrix a_;
  Matrix b_;
};

/// States x_0..x_N and controls u_0..u_{N-1} on a uniform grid of step dt.
struct Trajectory {
  double dt = 0.0;
  std::vector<Vector> states;
  std::vector<Vector> controls;

  int horizon() const { return static_cast<int>(controls.size()); }
};

/// Jacobians of one forward-Euler step, x_{k+1} ~ A dx_k + B du_k.
struct DiscreteLinearization {
  Matrix A;
  Matrix B;
};

/// f(x) + G(x) u.
Vector continuous_derivative(const ControlAffineSystem& sys, const Vector& x, const Vector& u);

/// x + dt (f(x) + G(x) u).
Vector euler_step(const ControlAffineSystem& sys, const Vector& x, const Vector& u, double dt);

/// A = I + dt (df/dx + d(G u)/dx), B = dt G(x).
DiscreteLinearization linearize_discrete(const ControlAffineSystem& sys, const Vector& x,
                                         const Vector& u, double dt);

/// Linearizations at every (x_k, u_k), k = 0..N-1.
std::vector<DiscreteLinearization> linearize_trajectory(const ControlAffineSystem& sys,
                                                        const Trajectory& traj);

/// Euler rollout of `controls` from x0.
Trajectory rollout(const ControlAffineSystem& sys, const Vector& x0,
                   const std::vector<Vector>& controls, double dt);

/// max_k ||x_{k+1} - euler_step(x_k, u_k)||_inf. Zero for a rollout.
double feasibility_residual(const ControlAffineSystem& sys, const Trajectory& traj);

/// Throws std::invalid_argument unless `traj` is shaped for `sys`.
void check_trajectory(const ControlAffineSystem& sys, const Trajectory& traj);

}  // namespace octrl
