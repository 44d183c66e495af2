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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "octrl/cost.hpp"
#include "octrl/dynamics.hpp"
#include "octrl/ilqr.hpp"
#include "octrl/optimality.hpp"
#include "octrl/sqp.hpp"

namespace octrl {

enum class SystemKind { pendulum, cartpole, scalar_custom };
enum class SolverKind { ilqr, sqp };
enum class SolverSelection { ilqr, sqp, both };

std::string_view to_string(SystemKind s);
std::string_view to_string(SolverKind s);
std::string_view to_string(SolverSelection s);
/// Throws std::invalid_argument on unknown names.
SystemKind parse_system(std::string_view name);
SolverSelection parse_solver(std::string_view name);

std::vector<SolverKind> solvers_of(SolverSelection selection);

/// A single entry means "scalar times identity"; otherwise diagonal entries.
struct CostWeights {
  std::vector<double> q{100.0};
  std::vector<double> r{10.0};
  std::vector<double> s_f{1000.0};
};

struct ClusterTolerances {
  double cost_rel_tol = 1e-3;
  double traj_tol = 1e-2;
};

struct ExperimentConfig {
  SystemKind system = SystemKind::cartpole;
  SolverSelection solver = SolverSelection::both;
  std::vector<double> dt_list{0.2, 0.1, 0.05, 0.01};
  double t_f = 3.0;
  std::optional<Vector> x0;  // defaults to the hanging configuration
  int n_starts = 32;
  std::uint64_t seed = 0;
  double init_std = 1.0;
  int workers = 1;

  PendulumModel::Params pendulum;
  CartpoleModel::Params cartpole;
  ScalarSineModel::Params scalar;
  CostWeights weights;
  ILQRSettings ilqr;
  SQPSettings sqp;
  ClusterTolerances cluster;

  std::vector<int> scaling_horizons;  // empty: per-solver defaults
  int scaling_repetitions = 5;

  /// Throws std::invalid_argument when inconsistent (e.g. t_f / dt not integral).
  void validate() const;
};

std::unique_ptr<ControlAffineSystem> make_system(const ExperimentConfig& config);
QuadraticCost make_cost(const ExperimentConfig& config);
/// config.x0, or [pi, 0] / [0, 0, pi, 0] / [1] for pendulum / cartpole / scalar.
Vector initial_state(const ExperimentConfig& config);

/// N = t_f / dt; throws std::invalid_argument unless integral to 1e-9 relative.
int horizon_steps(double t_f, double dt);

/// Per-start seed derived from (campaign seed, start index).
std::uint64_t start_seed(std::uint64_t seed, int start_index);

/// Gaussian N(0, sigma^2) initial guess for one start. x_init[0] = x0.
struct InitialGuess {
  std::vector<Vector> states;
  std::vector<Vector> controls;
};
InitialGuess random_initial_guess(int n, int m, int horizon, const Vector& x0, double sigma,
                                  std::uint64_t seed);

struct RunRecord {
  int start_index = 0;
  std::uint64_t seed = 0;
  SolverResult result;
  std::vector<IterationRecord> trace;

  bool converged() const { return result.termination == Termination::converged; }
};

/// Runs one start of `solver` with the config's problem and settings.
RunRecord run_single(const ExperimentConfig& config, SolverKind solver, double dt,
                     int start_index);

struct SolutionCluster {
  Trajectory representative;  // lowest-cost member
  int representative_start = 0;
  double representative_cost = 0.0;
  double mean_cost = 0.0;
  std::vector<int> member_starts;
  std::vector<std::uint64_t> member_seeds;
  std::vector<double> member_costs;
  std::vector<double> member_residuals;

  int size() const { return static_cast<int>(member_starts.size()); }
};

struct SolutionClusterSet {
  double dt = 0.0;
  SolverKind solver = SolverKind::ilqr;
  int n_starts = 0;
  std::vector<SolutionCluster> clusters;  // ascending cost
  std::vector<RunRecord> failures;        // non-converged starts

  /// Lowest representative cost; NaN when empty.
  double best_cost() const;
};

/**
 * Greedy grouping of converged runs visited in ascending cost. A run joins the
 * first cluster whose representative satisfies
 *   |J - J_rep| <= cost_rel_tol (1 + min(J, J_rep))   and
 *   rms(u - u_rep) <= traj_tol (1 + rms(u_rep)),
 * otherwise it opens a new cluster. Non-converged runs become failures.
 */
SolutionClusterSet cluster_solutions(const std::vector<RunRecord>& runs,
                                     const ClusterTolerances& tol);

/// `n_starts` solves on `workers` threads, merged by start index, then clustered.
/// Output does not depend on the worker count.
struct MultistartOutput {
  SolutionClusterSet clusters;
  std::vector<RunRecord> runs;  // every start, in index order
};
MultistartOutput run_multistart(const ExperimentConfig& config, SolverKind solver, double dt);

/// Start-by-start progress hook for long campaigns.
using ProgressCallback = std::function<void(const RunRecord&, SolverKind, double dt)>;
MultistartOutput run_multistart(const ExperimentConfig& config, SolverKind solver, double dt,
                                const ProgressCallback& progress);

struct StuckCheck {
  int cluster_id = 0;
  double cluster_cost = 0.0;
  double ilqr_cost = 0.0;
  double relative_change = 0.0;
  double residual = 0.0;
  Termination termination = Termination::numerical_failure;
  bool stationary = false;
};

struct CrossCheckRow {
  double dt = 0.0;
  SolutionClusterSet ilqr;
  SolutionClusterSet sqp;
  /// (J_ilqr - min J_sqp) / min J_sqp.
  double relative_gap = 0.0;
  /// iLQR started from each SQP cluster representative.
  std::vector<StuckCheck> stuck;
};

struct CrossCheckReport {
  std::vector<CrossCheckRow> rows;
};

/// iLQR warm-started at `representative`'s controls.
StuckCheck check_stationary_under_ilqr(const ExperimentConfig& config,
                                       const SolutionCluster& representative, double dt,
                                       int cluster_id);

/// Runs both solvers at every dt of the config and compares them.
CrossCheckReport cross_check(const ExperimentConfig& config,
                             const ProgressCallback& progress = nullptr);

struct ScalingPoint {
  int horizon = 0;
  double median_seconds = 0.0;
  std::vector<double> samples;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double slope = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Times `make_workload(N)()` for each N (median over `repetitions` samples)
/// and fits the log-log slope. The factory's own cost is not timed.
ScalingReport measure_scaling(const std::function<std::function<void()>(int)>& make_workload,
                              const std::vector<int>& horizons, int repetitions);

/// Per-iteration work of `solver` on the config's system: linearize, quadratize,
/// backward and forward pass for iLQR; QP assembly and dense KKT solve for SQP.
ScalingReport measure_scaling(const ExperimentConfig& config, SolverKind solver,
                              const std::vector<int>& horizons);

/// {100, 200, 400, 800, 1600} for iLQR, {100, 200, 400, 800} for SQP.
std::vector<int> default_scaling_horizons(SolverKind solver);

}  // namespace octrl
