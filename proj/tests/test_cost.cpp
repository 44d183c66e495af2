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

#include <random>

#include <gtest/gtest.h>

#include "octrl/cost.hpp"
#include "test_support.hpp"

using namespace octrl;
using octrl::testing::random_vector;

namespace {

Trajectory random_trajectory(std::mt19937_64& rng, int n, int m, int N, double dt) {
  Trajectory t;
  t.dt = dt;
  for (int k = 0; k <= N; ++k) t.states.push_back(random_vector(rng, n, 3.0));
  for (int k = 0; k < N; ++k) t.controls.push_back(random_vector(rng, m, 3.0));
  return t;
}

}  // namespace

TEST(TotalCost, ZeroTrajectoryCostsNothing) {
  const QuadraticCost c = QuadraticCost::scaled_identity(4, 1, 100, 10, 1000);
  Trajectory t{0.1, std::vector<Vector>(11, Vector::Zero(4)), std::vector<Vector>(10, Vector::Zero(1))};
  EXPECT_EQ(total_cost(c, t), 0.0);
}

TEST(TotalCost, HandComputedScalarExample) {
  const QuadraticCost c = QuadraticCost::scaled_identity(1, 1, 100, 10, 1000);
  Trajectory t{0.1, {Vector::Constant(1, 1.0), Vector::Constant(1, 0.5)}, {Vector::Constant(1, 2.0)}};
  // 0.1 (100 + 40) + 0.5 * 1000 * 0.25
  EXPECT_NEAR(total_cost(c, t), 139.0, 1e-12);
}

TEST(Quadratize, ScalarStateGradient) {
  const QuadraticCost c = QuadraticCost::scaled_identity(1, 1, 100, 10, 1000);
  Trajectory t{0.2, {Vector::Constant(1, 3.0), Vector::Zero(1)}, {Vector::Zero(1)}};
  EXPECT_NEAR(quadratize(c, t).state_gradient[0](0), 120.0, 1e-12);
}

TEST(Quadratize, ZeroTrajectory) {
  const QuadraticCost c = QuadraticCost::scaled_identity(2, 1, 100, 10, 1000);
  const double dt = 0.05;
  Trajectory t{dt, std::vector<Vector>(4, Vector::Zero(2)), std::vector<Vector>(3, Vector::Zero(1))};
  const CostQuadratization q = quadratize(c, t);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(q.state_gradient[k].norm(), 0.0);
    EXPECT_EQ(q.control_gradient[k].norm(), 0.0);
    EXPECT_LT((q.state_hessian[k] - 2 * dt * 100 * Matrix::Identity(2, 2)).norm(), 1e-12);
    EXPECT_LT((q.control_hessian[k] - 2 * dt * 10 * Matrix::Identity(1, 1)).norm(), 1e-12);
  }
  EXPECT_EQ(q.terminal_gradient.norm(), 0.0);
  EXPECT_EQ(q.terminal_hessian, 1000 * Matrix::Identity(2, 2));
}

TEST(Quadratize, GradientsMatchFiniteDifferencesOfTotalCost) {
  std::mt19937_64 rng(9);
  Matrix Q(2, 2), S(2, 2);
  Q << 3.0, 1.0, 1.0, 2.0;
  S << 5.0, -1.0, -1.0, 4.0;
  const QuadraticCost c(Q, Matrix::Constant(1, 1, 0.7), S);
  for (int trial = 0; trial < 50; ++trial) {
    const Trajectory t = random_trajectory(rng, 2, 1, 6, 0.1);
    const CostQuadratization q = quadratize(c, t);
    for (int k = 0; k <= t.horizon(); ++k) {
      const Vector g = octrl::testing::fd_gradient(
          [&](const Vector& x) {
            Trajectory p = t;
            p.states[k] = x;
            return total_cost(c, p);
          },
          t.states[k]);
      const Vector analytic = k < t.horizon() ? q.state_gradient[k] : q.terminal_gradient;
      EXPECT_LE(octrl::testing::relative_error(analytic, g), 1e-6);
    }
    for (int k = 0; k < t.horizon(); ++k) {
      const Vector g = octrl::testing::fd_gradient(
          [&](const Vector& u) {
            Trajectory p = t;
            p.controls[k] = u;
            return total_cost(c, p);
          },
          t.controls[k]);
      EXPECT_LE(octrl::testing::relative_error(q.control_gradient[k], g), 1e-6);
    }
  }
}

TEST(Quadratize, HessiansMatchFiniteDifferences) {
  std::mt19937_64 rng(13);
  const QuadraticCost c = QuadraticCost::scaled_identity(4, 1, 100, 10, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_vector(rng, 4, 3.0);
    const Vector u = random_vector(rng, 1, 3.0);
    using octrl::testing::fd_jacobian;
    using octrl::testing::relative_error;
    EXPECT_LE(relative_error(c.state_cost_hessian(x),
                             fd_jacobian([&](const Vector& z) { return c.state_cost_gradient(z); }, x)),
              1e-5);
    EXPECT_LE(relative_error(c.control_cost_hessian(u),
                             fd_jacobian([&](const Vector& w) { return c.control_cost_gradient(w); }, u)),
              1e-5);
    EXPECT_LE(relative_error(c.terminal_cost_hessian(x),
                             fd_jacobian([&](const Vector& z) { return c.terminal_cost_gradient(z); }, x)),
              1e-5);
  }
}

TEST(QuadraticCost, NonNegativeAndSymmetrized) {
  std::mt19937_64 rng(21);
  Matrix Q(2, 2);
  Q << 2.0, 1.0, 0.0, 2.0;  // not symmetric
  Matrix Qs = 0.5 * (Q + Q.transpose());
  const QuadraticCost a(Q, Matrix::Identity(1, 1), Matrix::Identity(2, 2));
  const QuadraticCost b(Qs, Matrix::Identity(1, 1), Matrix::Identity(2, 2));
  EXPECT_EQ(a.Q(), a.Q().transpose());
  for (int i = 0; i < 50; ++i) {
    const Trajectory t = random_trajectory(rng, 2, 1, 5, 0.2);
    EXPECT_GE(total_cost(a, t), 0.0);
    EXPECT_EQ(total_cost(a, t), total_cost(b, t));
  }
}

TEST(QuadraticCost, RejectsInvalidWeights) {
  const Matrix I = Matrix::Identity(2, 2);
  EXPECT_THROW(QuadraticCost(I, Matrix::Zero(1, 1), I), std::invalid_argument);
  EXPECT_THROW(QuadraticCost(-I, Matrix::Identity(1, 1), I), std::invalid_argument);
  EXPECT_THROW(QuadraticCost(I, Matrix::Identity(1, 1), Matrix::Identity(3, 3)), std::invalid_argument);
  EXPECT_NO_THROW(QuadraticCost(Matrix::Zero(2, 2), Matrix::Identity(1, 1), Matrix::Zero(2, 2)));
}

TEST(TotalCost, RejectsDimensionMismatch) {
  const QuadraticCost c = QuadraticCost::scaled_identity(2, 1, 1, 1, 1);
  Trajectory t{0.1, {Vector::Zero(3), Vector::Zero(3)}, {Vector::Zero(1)}};
  EXPECT_THROW(total_cost(c, t), std::invalid_argument);
}
