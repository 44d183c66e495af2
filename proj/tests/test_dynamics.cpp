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

#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "octrl/dynamics.hpp"
#include "test_support.hpp"

using namespace octrl;
using octrl::testing::fd_jacobian;
using octrl::testing::random_vector;
using octrl::testing::relative_error;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<std::shared_ptr<ControlAffineSystem>> all_models() {
  return {std::make_shared<PendulumModel>(), std::make_shared<CartpoleModel>(),
          std::make_shared<ScalarSineModel>(ScalarSineModel::Params{1.5, 0.7})};
}

}  // namespace

TEST(Pendulum, EquilibriaOfTheDrift) {
  PendulumModel p;
  EXPECT_LT(continuous_derivative(p, vec({M_PI, 0}), vec({0})).norm(), 1e-14);
  EXPECT_EQ(continuous_derivative(p, vec({0, 0}), vec({0})).norm(), 0.0);
}

TEST(Pendulum, MatchesClosedForm) {
  PendulumModel p;
  const Vector x = vec({0.3, -1.2});
  const Vector xd = continuous_derivative(p, x, vec({0.4}));
  EXPECT_DOUBLE_EQ(xd(0), -1.2);
  EXPECT_NEAR(xd(1), 9.81 / 0.5 * std::sin(0.3) + 0.4 / (0.5 * 0.25), 1e-13);
}

TEST(Cartpole, DriftVanishesAtEquilibria) {
  CartpoleModel c;
  for (double p : {-3.0, 0.0, 2.5}) {
    EXPECT_LT(continuous_derivative(c, vec({p, 0, 0, 0}), vec({0})).norm(), 1e-15);
    EXPECT_LT(continuous_derivative(c, vec({p, 0, M_PI, 0}), vec({0})).norm(), 1e-14);
  }
}

TEST(Cartpole, MatchesLagrangianDerivation) {
  CartpoleModel c;
  const Vector x = vec({0, 0, M_PI / 4, 0});
  const Vector expected =
      octrl::testing::cartpole_lagrangian_derivative(x, 1.0, 1.0, 0.01, 0.6, 9.81);
  EXPECT_LT((continuous_derivative(c, x, vec({1.0})) - expected).lpNorm<Eigen::Infinity>(), 1e-13);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vector xr = random_vector(rng, 4, 3.0);
    const double u = random_vector(rng, 1, 5.0)(0);
    const Vector ref = octrl::testing::cartpole_lagrangian_derivative(xr, u, 1.0, 0.01, 0.6, 9.81);
    EXPECT_LT((continuous_derivative(c, xr, vec({u})) - ref).lpNorm<Eigen::Infinity>(),
              1e-12 * (1 + ref.norm()));
  }
}

TEST(EulerStep, ComposesTheDerivative) {
  CartpoleModel c;
  const Vector x = vec({0, 0, M_PI, 0});
  const Vector expected =
      x + 0.1 * octrl::testing::cartpole_lagrangian_derivative(x, 5.0, 1.0, 0.01, 0.6, 9.81);
  EXPECT_LT((euler_step(c, x, vec({5.0}), 0.1) - expected).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(EulerStep, EquilibriumIsAFixedPoint) {
  PendulumModel p;
  const Vector x = vec({M_PI, 0});
  for (double dt : {0.01, 0.2, 5.0}) {
    EXPECT_LT((euler_step(p, x, vec({0}), dt) - x).norm(), 1e-13);
  }
  CartpoleModel c;
  const Vector y = vec({1.0, 0, 0, 0});
  EXPECT_EQ(euler_step(c, y, vec({0}), 0.3), y);
}

TEST(EulerStep, IsAffineInControl) {
  std::mt19937_64 rng(5);
  for (const auto& sys : all_models()) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = random_vector(rng, sys->state_dim(), 2.0);
      const Vector u1 = random_vector(rng, sys->control_dim(), 3.0);
      const Vector u2 = random_vector(rng, sys->control_dim(), 3.0);
      const double a = 0.3;
      const Vector lhs = euler_step(*sys, x, a * u1 + (1 - a) * u2, 0.05);
      const Vector rhs = a * euler_step(*sys, x, u1, 0.05) + (1 - a) * euler_step(*sys, x, u2, 0.05);
      EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-12) << sys->name();
    }
  }
}

TEST(EulerStep, RejectsBadInput) {
  PendulumModel p;
  EXPECT_THROW(euler_step(p, vec({0, 0}), vec({0}), 0.0), std::invalid_argument);
  EXPECT_THROW(euler_step(p, vec({0, 0}), vec({0}), -0.1), std::invalid_argument);
  EXPECT_THROW(euler_step(p, vec({0, 0, 0}), vec({0}), 0.1), std::invalid_argument);
  EXPECT_THROW(continuous_derivative(p, vec({0, 0}), vec({0, 1})), std::invalid_argument);
}

TEST(Linearization, ZeroStepLimit) {
  CartpoleModel c;
  const DiscreteLinearization lin = linearize_discrete(c, vec({0.1, 0.2, 2.0, -1}), vec({3}), 1e-12);
  EXPECT_LT((lin.A - Matrix::Identity(4, 4)).norm(), 1e-10);
  EXPECT_LT(lin.B.norm(), 1e-10);
}

TEST(Linearization, PendulumAtHangingMatchesFiniteDifferences) {
  PendulumModel p;
  const Vector x = vec({M_PI, 0});
  const Vector u = vec({0});
  const DiscreteLinearization lin = linearize_discrete(p, x, u, 0.1);
  const Matrix A_fd = fd_jacobian([&](const Vector& z) { return euler_step(p, z, u, 0.1); }, x);
  const Matrix B_fd = fd_jacobian([&](const Vector& w) { return euler_step(p, x, w, 0.1); }, u);
  EXPECT_LE(relative_error(lin.A, A_fd), 1e-5);
  EXPECT_LE(relative_error(lin.B, B_fd), 1e-5);
}

TEST(Linearization, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(2026);
  for (const auto& sys : all_models()) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_vector(rng, sys->state_dim(), 4.0);
      const Vector u = random_vector(rng, sys->control_dim(), 10.0);
      const double dt = 0.05;
      const DiscreteLinearization lin = linearize_discrete(*sys, x, u, dt);
      const Matrix A_fd =
          fd_jacobian([&](const Vector& z) { return euler_step(*sys, z, u, dt); }, x);
      const Matrix B_fd =
          fd_jacobian([&](const Vector& w) { return euler_step(*sys, x, w, dt); }, u);
      EXPECT_LE(relative_error(lin.A, A_fd), 1e-5) << sys->name();
      EXPECT_LE(relative_error(lin.B, B_fd), 1e-5) << sys->name();

      const Matrix f_fd = fd_jacobian([&](const Vector& z) { return sys->drift(z); }, x);
      EXPECT_LE(relative_error(sys->drift_jacobian(x), f_fd), 1e-5) << sys->name();
      const Matrix gu_fd =
          fd_jacobian([&](const Vector& z) { return Vector(sys->input_matrix(z) * u); }, x);
      EXPECT_LE(relative_error(sys->input_matrix_jacobian(x, u), gu_fd), 1e-5) << sys->name();
    }
  }
}

TEST(Rollout, IsFeasible) {
  CartpoleModel c;
  std::mt19937_64 rng(3);
  std::vector<Vector> u;
  for (int k = 0; k < 40; ++k) u.push_back(random_vector(rng, 1, 5.0));
  const Trajectory t = rollout(c, vec({0, 0, M_PI, 0}), u, 0.05);
  ASSERT_EQ(t.states.size(), 41u);
  EXPECT_EQ(t.horizon(), 40);
  EXPECT_LE(feasibility_residual(c, t), 1e-12);
}

TEST(Trajectory, ShapeChecks) {
  PendulumModel p;
  Trajectory bad{0.1, {vec({0, 0})}, {vec({0})}};
  EXPECT_THROW(check_trajectory(p, bad), std::invalid_argument);
  Trajectory wrong_dim{0.1, {vec({0, 0}), vec({0})}, {vec({0})}};
  EXPECT_THROW(check_trajectory(p, wrong_dim), std::invalid_argument);
}

TEST(Models, RejectInvalidParameters) {
  EXPECT_THROW(PendulumModel(PendulumModel::Params{0.0, 0.5, 9.81}), std::invalid_argument);
  EXPECT_THROW(CartpoleModel(CartpoleModel::Params{1.0, -0.01, 0.6, 9.81}), std::invalid_argument);
  EXPECT_THROW(LinearSystem(Matrix::Identity(2, 2), Matrix::Ones(3, 1)), std::invalid_argument);
}
