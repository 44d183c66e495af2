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

#include "octrl/ilqr.hpp"

#include <cmath>
#include <stdexcept>

namespace octrl {

namespace {

// Regularization never drops below this once it has been switched on, except
// back to exactly zero.
constexpr double kMinRegularization = 1e-6;

bool all_finite(const Trajectory& traj) {
  for (const Vector& x : traj.states) {
    if (!x.allFinite()) return false;
  }
  for (const Vector& u : traj.controls) {
    if (!u.allFinite()) return false;
  }
  return true;
}

}  // namespace

void ILQRSettings::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("ilqr.max_iterations must be >= 1");
  if (!(convergence_tol > 0)) throw std::invalid_argument("ilqr.convergence_tol must be > 0");
  if (!(stationarity_tol > 0)) throw std::invalid_argument("ilqr.stationarity_tol must be > 0");
  if (!(regularization_init >= 0)) {
    throw std::invalid_argument("ilqr.regularization_init must be >= 0");
  }
  if (!(regularization_max > 0)) throw std::invalid_argument("ilqr.regularization_max must be > 0");
  if (!(line_search_backtrack > 0 && line_search_backtrack < 1)) {
    throw std::invalid_argument("ilqr.line_search_backtrack must be in (0, 1)");
  }
  if (!(line_search_min_step > 0 && line_search_min_step <= 1)) {
    throw std::invalid_argument("ilqr.line_search_min_step must be in (0, 1]");
  }
}

namespace ilqr {

std::optional<BackwardPassResult> backward_pass(const Trajectory& traj,
                                                const std::vector<DiscreteLinearization>& lin,
                                                const CostQuadratization& quad,
                                                double regularization) {
  const int N = traj.horizon();
  if (static_cast<int>(lin.size()) != N || static_cast<int>(quad.control_gradient.size()) != N) {
    throw std::invalid_argument("backward_pass: linearization/quadratization length mismatch");
  }
  if (!(regularization >= 0)) throw std::invalid_argument("backward_pass: regularization < 0");

  BackwardPassResult out;
  out.k.resize(N);
  out.K.resize(N);
  out.v.resize(N + 1);
  out.V.resize(N + 1);
  out.v[N] = quad.terminal_gradient;
  out.V[N] = quad.terminal_hessian;

  for (int k = N - 1; k >= 0; --k) {
    const Matrix& A = lin[k].A;
    const Matrix& B = lin[k].B;
    const Vector& v_next = out.v[k + 1];
    const Matrix& V_next = out.V[k + 1];

    const Matrix VB = V_next * B;
    const Vector Qx = quad.state_gradient[k] + A.transpose() * v_next;
    const Vector Qu = quad.control_gradient[k] + B.transpose() * v_next;
    const Matrix Qxx = quad.state_hessian[k] + A.transpose() * V_next * A;
    const Matrix Quu = quad.control_hessian[k] + B.transpose() * VB;
    const Matrix Qux = VB.transpose() * A;

    Matrix Quu_reg = Quu;
    Quu_reg.diagonal().array() += regularization;
    Eigen::LLT<Matrix> llt(Quu_reg);
    if (llt.info() != Eigen::Success) return std::nullopt;

    Vector kff = llt.solve(Qu);
    Matrix Kfb = llt.solve(Qux);
    if (!kff.allFinite() || !Kfb.allFinite()) return std::nullopt;

    // Value expansion under du = -k - K dx.
    Vector v = Qx - Kfb.transpose() * Qu + Kfb.transpose() * (Quu * kff) - Qux.transpose() * kff;
    Matrix V = Qxx + Kfb.transpose() * Quu * Kfb - Kfb.transpose() * Qux - Qux.transpose() * Kfb;
    out.v[k] = std::move(v);
    out.V[k] = 0.5 * (V + V.transpose());
    out.k[k] = std::move(kff);
    out.K[k] = std::move(Kfb);
  }
  return out;
}

Matrix inverse_form_value_hessian(const Matrix& l_xx, const Matrix& a, const Matrix& b,
                                  const Matrix& r_uu, const Matrix& v_next) {
  const Matrix inner = v_next.inverse() + b * r_uu.inverse() * b.transpose();
  return l_xx + a.transpose() * inner.inverse() * a;
}

std::optional<Trajectory> forward_pass(const ControlAffineSystem& sys, const Trajectory& traj,
                                       const BackwardPassResult& gains, double step) {
  const int N = traj.horizon();
  if (static_cast<int>(gains.k.size()) != N || static_cast<int>(gains.K.size()) != N) {
    throw std::invalid_argument("forward_pass: gains do not match the trajectory horizon");
  }
  Trajectory out;
  out.dt = traj.dt;
  out.states.reserve(N + 1);
  out.controls.reserve(N);
  out.states.push_back(traj.states.front());
  for (int k = 0; k < N; ++k) {
    const Vector dx = out.states[k] - traj.states[k];
    out.controls.push_back(traj.controls[k] - step * gains.k[k] - gains.K[k] * dx);
    out.states.push_back(euler_step(sys, out.states[k], out.controls[k], traj.dt));
    if (!out.states.back().allFinite()) return std::nullopt;
  }
  return out;
}

SolverResult solve(const ControlAffineSystem& sys, const Cost& cost, const Vector& x0,
                   const std::vector<Vector>& u_init, double dt, const ILQRSettings& settings) {
  settings.validate();
  if (u_init.empty()) throw std::invalid_argument("ilqr::solve: empty control sequence");

  SolverResult result;
  Trajectory traj = rollout(sys, x0, u_init, dt);
  if (!all_finite(traj)) {
    result.trajectory = std::move(traj);
    result.termination = Termination::numerical_failure;
    return result;
  }
  double J = total_cost(cost, traj);
  double regularization = settings.regularization_init;
  double last_decrease = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double last_step = 0.0;
  Termination termination = Termination::max_iterations;

  int iteration = 0;
  for (; iteration < settings.max_iterations; ++iteration) {
    const std::vector<DiscreteLinearization> lin = linearize_trajectory(sys, traj);
    const CostQuadratization quad = quadratize(cost, traj);
    residual = stationarity_residual(lin, quad);

    if (settings.trace) {
      IterationRecord rec;
      rec.iteration = iteration;
      rec.cost = J;
      rec.regularization = regularization;
      rec.residual = residual;
      rec.step = last_step;
      settings.trace(rec);
    }

    if (last_decrease < settings.convergence_tol && residual <= settings.stationarity_tol) {
      termination = Termination::converged;
      break;
    }

    std::optional<BackwardPassResult> gains;
    while (!(gains = backward_pass(traj, lin, quad, regularization))) {
      if (regularization >= settings.regularization_max) break;
      regularization = std::min(settings.regularization_max,
                                std::max(10.0 * regularization, kMinRegularization));
    }
    if (!gains) {
      termination = Termination::numerical_failure;
      break;
    }

    bool accepted = false;
    for (double step = 1.0; step >= settings.line_search_min_step;
         step *= settings.line_search_backtrack) {
      std::optional<Trajectory> candidate = forward_pass(sys, traj, *gains, step);
      if (!candidate) continue;
      const double J_new = total_cost(cost, *candidate);
      if (std::isfinite(J_new) && J_new < J) {
        last_decrease = (J - J_new) / std::max(std::abs(J), 1e-300);
        traj = std::move(*candidate);
        J = J_new;
        last_step = step;
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      // No strict decrease is possible at a stationary point.
      termination = residual <= settings.stationarity_tol ? Termination::converged
                                                          : Termination::line_search_failure;
      ++iteration;
      break;
    }

    regularization = regularization / 2.0;
    if (regularization < kMinRegularization) regularization = 0.0;
  }

  if (termination == Termination::max_iterations) {
    residual = stationarity_residual(sys, cost, traj);
    if (last_decrease < settings.convergence_tol && residual <= settings.stationarity_tol) {
      termination = Termination::converged;
    }
  }

  result.trajectory = std::move(traj);
  result.cost = J;
  result.iterations = iteration;
  result.termination = termination;
  result.stationarity_residual = residual;
  return result;
}

}  // namespace ilqr
}  // namespace octrl
