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

#include "octrl/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace octrl {

namespace {

void require_size(const Vector& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected size " + std::to_string(expected) +
                                ", got " + std::to_string(v.size()));
  }
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Pendulum

PendulumModel::PendulumModel(const Params& params) : params_(params) {
  require_positive(params_.rod_length, "pendulum rod_length");
  require_positive(params_.mass, "pendulum mass");
  if (!std::isfinite(params_.gravity)) throw std::invalid_argument("pendulum gravity must be finite");
}

Vector PendulumModel::drift(const Vector& x) const {
  require_size(x, 2, "pendulum state");
  Vector f(2);
  f << x(1), params_.gravity / params_.rod_length * std::sin(x(0));
  return f;
}

Matrix PendulumModel::input_matrix(const Vector& x) const {
  require_size(x, 2, "pendulum state");
  Matrix g(2, 1);
  g << 0.0, 1.0 / (params_.mass * params_.rod_length * params_.rod_length);
  return g;
}

Matrix PendulumModel::drift_jacobian(const Vector& x) const {
  require_size(x, 2, "pendulum state");
  Matrix j(2, 2);
  j << 0.0, 1.0, params_.gravity / params_.rod_length * std::cos(x(0)), 0.0;
  return j;
}

Matrix PendulumModel::input_matrix_jacobian(const Vector& x, const Vector& u) const {
  require_size(x, 2, "pendulum state");
  require_size(u, 1, "pendulum control");
  return Matrix::Zero(2, 2);
}

// ---------------------------------------------------------------------------
// Cart-pole

CartpoleModel::CartpoleModel(const Params& params) : params_(params) {
  require_positive(params_.cart_mass, "cartpole cart_mass");
  require_positive(params_.pole_mass, "cartpole pole_mass");
  require_positive(params_.pole_length, "cartpole pole_length");
  if (!std::isfinite(params_.gravity)) throw std::invalid_argument("cartpole gravity must be finite");
}

Vector CartpoleModel::drift(const Vector& x) const {
  require_size(x, 4, "cartpole state");
  const double mc = params_.cart_mass, mp = params_.pole_mass;
  const double l = params_.pole_length, g = params_.gravity;
  const double s = std::sin(x(2)), c = std::cos(x(2)), w = x(3);
  const double d = mc + mp * s * s;

  Vector f(4);
  f << x(1),
      mp * s * (l * w * w - g * c) / d,
      w,
      ((mc + mp) * g * s - mp * l * w * w * s * c) / (l * d);
  return f;
}

Matrix CartpoleModel::input_matrix(const Vector& x) const {
  require_size(x, 4, "cartpole state");
  const double mc = params_.cart_mass, mp = params_.pole_mass, l = params_.pole_length;
  const double s = std::sin(x(2)), c = std::cos(x(2));
  const double d = mc + mp * s * s;

  Matrix gm(4, 1);
  gm << 0.0, 1.0 / d, 0.0, -c / (l * d);
  return gm;
}

Matrix CartpoleModel::drift_jacobian(const Vector& x) const {
  require_size(x, 4, "cartpole state");
  const double mc = params_.cart_mass, mp = params_.pole_mass;
  const double l = params_.pole_length, g = params_.gravity;
  const double s = std::sin(x(2)), c = std::cos(x(2)), w = x(3);
  const double d = mc + mp * s * s;
  const double dd = 2.0 * mp * s * c;  // d(d)/d(theta)

  const double n2 = mp * s * (l * w * w - g * c);
  const double n2_th = mp * l * w * w * c - mp * g * (c * c - s * s);
  const double n2_w = 2.0 * mp * l * w * s;

  const double n4 = (mc + mp) * g * s - mp * l * w * w * s * c;
  const double n4_th = (mc + mp) * g * c - mp * l * w * w * (c * c - s * s);
  const double n4_w = -2.0 * mp * l * w * s * c;

  Matrix j = Matrix::Zero(4, 4);
  j(0, 1) = 1.0;
  j(1, 2) = (n2_th * d - n2 * dd) / (d * d);
  j(1, 3) = n2_w / d;
  j(2, 3) = 1.0;
  j(3, 2) = (n4_th * d - n4 * dd) / (l * d * d);
  j(3, 3) = n4_w / (l * d);
  return j;
}

Matrix CartpoleModel::input_matrix_jacobian(const Vector& x, const Vector& u) const {
  require_size(x, 4, "cartpole state");
  require_size(u, 1, "cartpole control");
  const double mc = params_.cart_mass, mp = params_.pole_mass, l = params_.pole_length;
  const double s = std::sin(x(2)), c = std::cos(x(2));
  const double d = mc + mp * s * s;
  const double dd = 2.0 * mp * s * c;

  Matrix j = Matrix::Zero(4, 4);
  j(1, 2) = -u(0) * dd / (d * d);
  j(3, 2) = u(0) * (s * d + c * dd) / (l * d * d);
  return j;
}

// ---------------------------------------------------------------------------
// Scalar sine

Vector ScalarSineModel::drift(const Vector& x) const {
  require_size(x, 1, "scalar state");
  return Vector::Constant(1, params_.drift_gain * std::sin(x(0)));
}

Matrix ScalarSineModel::input_matrix(const Vector& x) const {
  require_size(x, 1, "scalar state");
  return Matrix::Constant(1, 1, params_.input_gain);
}

Matrix ScalarSineModel::drift_jacobian(const Vector& x) const {
  require_size(x, 1, "scalar state");
  return Matrix::Constant(1, 1, params_.drift_gain * std::cos(x(0)));
}

Matrix ScalarSineModel::input_matrix_jacobian(const Vector& x, const Vector& u) const {
  require_size(x, 1, "scalar state");
  require_size(u, 1, "scalar control");
  return Matrix::Zero(1, 1);
}

// ---------------------------------------------------------------------------
// Linear

LinearSystem::LinearSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols() || b_.rows() != a_.rows() || b_.cols() == 0) {
    throw std::invalid_argument("LinearSystem: A must be square and B must have A's row count");
  }
}

// ---------------------------------------------------------------------------
// Discretization

Vector continuous_derivative(const ControlAffineSystem& sys, const Vector& x, const Vector& u) {
  require_size(x, sys.state_dim(), "state");
  require_size(u, sys.control_dim(), "control");
  return sys.drift(x) + sys.input_matrix(x) * u;
}

Vector euler_step(const ControlAffineSystem& sys, const Vector& x, const Vector& u, double dt) {
  require_positive(dt, "dt");
  return x + dt * continuous_derivative(sys, x, u);
}

DiscreteLinearization linearize_discrete(const ControlAffineSystem& sys, const Vector& x,
                                         const Vector& u, double dt) {
  require_positive(dt, "dt");
  require_size(x, sys.state_dim(), "state");
  require_size(u, sys.control_dim(), "control");
  const int n = sys.state_dim();
  DiscreteLinearization lin;
  lin.A = Matrix::Identity(n, n) + dt * (sys.drift_jacobian(x) + sys.input_matrix_jacobian(x, u));
  lin.B = dt * sys.input_matrix(x);
  return lin;
}

std::vector<DiscreteLinearization> linearize_trajectory(const ControlAffineSystem& sys,
                                                        const Trajectory& traj) {
  check_trajectory(sys, traj);
  std::vector<DiscreteLinearization> out;
  out.reserve(traj.controls.size());
  for (int k = 0; k < traj.horizon(); ++k) {
    out.push_back(linearize_discrete(sys, traj.states[k], traj.controls[k], traj.dt));
  }
  return out;
}

Trajectory rollout(const ControlAffineSystem& sys, const Vector& x0,
                   const std::vector<Vector>& controls, double dt) {
  require_positive(dt, "dt");
  require_size(x0, sys.state_dim(), "initial state");
  Trajectory traj;
  traj.dt = dt;
  traj.controls = controls;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  for (const Vector& u : controls) {
    traj.states.push_back(euler_step(sys, traj.states.back(), u, dt));
  }
  return traj;
}

double feasibility_residual(const ControlAffineSystem& sys, const Trajectory& traj) {
  check_trajectory(sys, traj);
  double worst = 0.0;
  for (int k = 0; k < traj.horizon(); ++k) {
    const Vector defect =
        traj.states[k + 1] - euler_step(sys, traj.states[k], traj.controls[k], traj.dt);
    worst = std::max(worst, defect.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

void check_trajectory(const ControlAffineSystem& sys, const Trajectory& traj) {
  require_positive(traj.dt, "trajectory dt");
  if (traj.states.size() != traj.controls.size() + 1) {
    throw std::invalid_argument("trajectory: need exactly one more state than controls");
  }
  for (const Vector& x : traj.states) require_size(x, sys.state_dim(), "trajectory state");
  for (const Vector& u : traj.controls) require_size(u, sys.control_dim(), "trajectory control");
}

}  // namespace octrl
