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

#include "octrl/sqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace octrl {

namespace {

// Added to the state blocks of H when the first factorization fails.
constexpr double kStateRegularization = 1e-8;

Vector stacked_defects(const ControlAffineSystem& sys, const Trajectory& traj) {
  const int n = sys.state_dim();
  const int N = traj.horizon();
  Vector r(n * N);
  for (int k = 0; k < N; ++k) {
    r.segment(k * n, n) =
        traj.states[k + 1] - euler_step(sys, traj.states[k], traj.controls[k], traj.dt);
  }
  return r;
}

Trajectory apply_step(const QPSubproblem& qp, const Trajectory& traj, const Vector& z,
                      double alpha) {
  Trajectory out = traj;
  for (int k = 1; k <= qp.horizon; ++k) {
    out.states[k] += alpha * z.segment(qp.state_offset(k), qp.state_dim);
  }
  for (int k = 0; k < qp.horizon; ++k) {
    out.controls[k] += alpha * z.segment(qp.control_offset(k), qp.control_dim);
  }
  return out;
}

bool all_finite(const Trajectory& traj) {
  return std::all_of(traj.states.begin(), traj.states.end(),
                     [](const Vector& x) { return x.allFinite(); }) &&
         std::all_of(traj.controls.begin(), traj.controls.end(),
                     [](const Vector& u) { return u.allFinite(); });
}

}  // namespace

void SQPSettings::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("sqp.max_iterations must be >= 1");
  if (!(kkt_tol > 0)) throw std::invalid_argument("sqp.kkt_tol must be > 0");
  if (!(stationarity_tol > 0)) throw std::invalid_argument("sqp.stationarity_tol must be > 0");
  if (!(merit_penalty_init > 0)) throw std::invalid_argument("sqp.merit_penalty_init must be > 0");
  if (!(line_search_backtrack > 0 && line_search_backtrack < 1)) {
    throw std::invalid_argument("sqp.line_search_backtrack must be in (0, 1)");
  }
  if (!(line_search_min_step > 0 && line_search_min_step <= 1)) {
    throw std::invalid_argument("sqp.line_search_min_step must be in (0, 1]");
  }
  if (!(armijo > 0 && armijo < 0.5)) throw std::invalid_argument("sqp.armijo must be in (0, 0.5)");
}

namespace sqp {

QPSubproblem build_qp(const ControlAffineSystem& sys, const Cost& cost, const Trajectory& traj) {
  check_trajectory(sys, traj);
  const int n = sys.state_dim();
  const int m = sys.control_dim();
  const int N = traj.horizon();
  if (N < 1) throw std::invalid_argument("build_qp: horizon must be >= 1");

  const CostQuadratization quad = quadratize(cost, traj);

  QPSubproblem qp;
  qp.state_dim = n;
  qp.control_dim = m;
  qp.horizon = N;
  const int D = qp.num_variables();
  qp.H = Matrix::Zero(D, D);
  qp.g = Vector::Zero(D);
  qp.C = Matrix::Zero(qp.num_constraints(), D);
  qp.r = stacked_defects(sys, traj);

  for (int k = 1; k <= N; ++k) {
    const int ix = qp.state_offset(k);
    if (k < N) {
      qp.H.block(ix, ix, n, n) = quad.state_hessian[k];
      qp.g.segment(ix, n) = quad.state_gradient[k];
    } else {
      qp.H.block(ix, ix, n, n) = quad.terminal_hessian;
      qp.g.segment(ix, n) = quad.terminal_gradient;
    }
  }
  for (int k = 0; k < N; ++k) {
    const int iu = qp.control_offset(k);
    qp.H.block(iu, iu, m, m) = quad.control_hessian[k];
    qp.g.segment(iu, m) = quad.control_gradient[k];
  }

  for (int k = 0; k < N; ++k) {
    const DiscreteLinearization lin =
        linearize_discrete(sys, traj.states[k], traj.controls[k], traj.dt);
    const int row = k * n;
    qp.C.block(row, qp.state_offset(k + 1), n, n) = Matrix::Identity(n, n);
    if (k > 0) qp.C.block(row, qp.state_offset(k), n, n) = -lin.A;
    qp.C.block(row, qp.control_offset(k), n, m) = -lin.B;
  }
  return qp;
}

std::optional<QPSolution> solve_eq_qp(const QPSubproblem& qp) {
  const int D = qp.num_variables();
  const int P = qp.num_constraints();
  if (qp.H.rows() != D || qp.H.cols() != D || qp.g.size() != D || qp.C.rows() != P ||
      qp.C.cols() != D || qp.r.size() != P) {
    throw std::invalid_argument("solve_eq_qp: inconsistent subproblem dimensions");
  }

  Matrix kkt = Matrix::Zero(D + P, D + P);
  kkt.topLeftCorner(D, D) = qp.H;
  kkt.topRightCorner(D, P) = qp.C.transpose();
  kkt.bottomLeftCorner(P, D) = qp.C;
  Vector rhs(D + P);
  rhs << -qp.g, -qp.r;

  Eigen::PartialPivLU<Matrix> lu(kkt);
  Vector sol = lu.solve(rhs);
  Vector res = rhs - kkt * sol;
  sol += lu.solve(res);  // one step of iterative refinement
  res = rhs - kkt * sol;

  const double residual = res.lpNorm<Eigen::Infinity>();
  const double g_norm = qp.g.size() > 0 ? qp.g.lpNorm<Eigen::Infinity>() : 0.0;
  if (!sol.allFinite() || !(residual <= 1e-9 * (1.0 + g_norm))) return std::nullopt;

  QPSolution out;
  out.step = sol.head(D);
  out.multipliers = sol.tail(P);
  out.kkt_residual = residual;
  return out;
}

double kkt_residual(const ControlAffineSystem& sys, const Cost& cost, const Trajectory& traj) {
  const double stationarity =
      stationarity_residual(linearize_trajectory(sys, traj), quadratize(cost, traj));
  return std::max(stationarity, stacked_defects(sys, traj).lpNorm<Eigen::Infinity>());
}

SolverResult solve(const ControlAffineSystem& sys, const Cost& cost, const Vector& x0,
                   const std::vector<Vector>& x_init, const std::vector<Vector>& u_init,
                   double dt, const SQPSettings& settings) {
  settings.validate();
  if (u_init.empty()) throw std::invalid_argument("sqp::solve: empty control sequence");
  if (x_init.size() != u_init.size() + 1) {
    throw std::invalid_argument("sqp::solve: x_init must have one more entry than u_init");
  }

  Trajectory traj{dt, x_init, u_init};
  traj.states[0] = x0;
  check_trajectory(sys, traj);

  double penalty = settings.merit_penalty_init;
  Termination termination = Termination::max_iterations;
  int iteration = 0;
  double last_step = 0.0;

  for (; iteration < settings.max_iterations; ++iteration) {
    QPSubproblem qp = build_qp(sys, cost, traj);
    const std::vector<DiscreteLinearization> lin = linearize_trajectory(sys, traj);
    const double stationarity = stationarity_residual(lin, quadratize(cost, traj));
    const double defect = qp.r.lpNorm<Eigen::Infinity>();
    const double kkt = std::max(stationarity, defect);
    const double J = total_cost(cost, traj);

    if (settings.trace) {
      IterationRecord rec;
      rec.iteration = iteration;
      rec.cost = J;
      rec.merit = J + penalty * qp.r.lpNorm<1>();
      rec.penalty = penalty;
      rec.step = last_step;
      rec.residual = kkt;
      settings.trace(rec);
    }

    if (kkt <= settings.kkt_tol) {
      // Defects grow along the rollout, so the reported trajectory is checked too.
      const Trajectory rolled = rollout(sys, x0, traj.controls, dt);
      if (all_finite(rolled) &&
          stationarity_residual(sys, cost, rolled) <= settings.stationarity_tol) {
        termination = Termination::converged;
        break;
      }
    }

    std::optional<QPSolution> sol = solve_eq_qp(qp);
    if (!sol) {
      for (int k = 1; k <= qp.horizon; ++k) {
        const int ix = qp.state_offset(k);
        qp.H.block(ix, ix, qp.state_dim, qp.state_dim).diagonal().array() += kStateRegularization;
      }
      sol = solve_eq_qp(qp);
    }
    if (!sol) {
      termination = Termination::numerical_failure;
      break;
    }

    penalty = std::max(penalty, 2.0 * sol->multipliers.lpNorm<Eigen::Infinity>());
    const double violation = qp.r.lpNorm<1>();
    const double merit = J + penalty * violation;
    const double slope = std::min(0.0, qp.g.dot(sol->step) - penalty * violation);

    bool accepted = false;
    for (double alpha = 1.0; alpha >= settings.line_search_min_step;
         alpha *= settings.line_search_backtrack) {
      Trajectory candidate = apply_step(qp, traj, sol->step, alpha);
      if (!all_finite(candidate)) continue;
      const double merit_new =
          total_cost(cost, candidate) + penalty * stacked_defects(sys, candidate).lpNorm<1>();
      // Merit differences below a few ulps of the merit are roundoff.
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(merit);
      if (std::isfinite(merit_new) &&
          merit_new <= merit + settings.armijo * alpha * slope + slack) {
        traj = std::move(candidate);
        last_step = alpha;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      termination = Termination::line_search_failure;
      ++iteration;
      break;
    }
  }

  SolverResult result;
  result.trajectory = rollout(sys, x0, traj.controls, dt);
  result.iterations = iteration;
  result.termination = termination;
  if (all_finite(result.trajectory)) {
    result.cost = total_cost(cost, result.trajectory);
    result.stationarity_residual = stationarity_residual(sys, cost, result.trajectory);
    if (termination == Termination::line_search_failure &&
        result.stationarity_residual <= settings.stationarity_tol) {
      result.termination = Termination::converged;
    }
  } else {
    result.termination = Termination::numerical_failure;
  }
  return result;
}

}  // namespace sqp
}  // namespace octrl
