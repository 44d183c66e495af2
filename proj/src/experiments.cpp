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

#include "octrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include <fmt/core.h>

namespace octrl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix weight_matrix(const std::vector<double>& w, int n, const char* what) {
  if (w.size() == 1) return w.front() * Matrix::Identity(n, n);
  if (static_cast<int>(w.size()) != n) {
    throw std::invalid_argument(fmt::format("cost.{} needs 1 or {} entries, got {}", what, n,
                                            w.size()));
  }
  return Eigen::Map<const Vector>(w.data(), n).asDiagonal();
}

double rms(const std::vector<Vector>& u) {
  double sum = 0.0;
  long count = 0;
  for (const Vector& v : u) {
    sum += v.squaredNorm();
    count += v.size();
  }
  return count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

double rms_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  long count = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += (a[k] - b[k]).squaredNorm();
    count += a[k].size();
  }
  return count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string_view to_string(SystemKind s) {
  switch (s) {
    case SystemKind::pendulum: return "pendulum";
    case SystemKind::cartpole: return "cartpole";
    case SystemKind::scalar_custom: return "scalar-custom";
  }
  return "unknown";
}

std::string_view to_string(SolverKind s) { return s == SolverKind::ilqr ? "ilqr" : "sqp"; }

std::string_view to_string(SolverSelection s) {
  switch (s) {
    case SolverSelection::ilqr: return "ilqr";
    case SolverSelection::sqp: return "sqp";
    case SolverSelection::both: return "both";
  }
  return "unknown";
}

SystemKind parse_system(std::string_view name) {
  if (name == "pendulum") return SystemKind::pendulum;
  if (name == "cartpole") return SystemKind::cartpole;
  if (name == "scalar-custom") return SystemKind::scalar_custom;
  throw std::invalid_argument(fmt::format("unknown system '{}'", name));
}

SolverSelection parse_solver(std::string_view name) {
  if (name == "ilqr") return SolverSelection::ilqr;
  if (name == "sqp") return SolverSelection::sqp;
  if (name == "both") return SolverSelection::both;
  throw std::invalid_argument(fmt::format("unknown solver '{}'", name));
}

std::vector<SolverKind> solvers_of(SolverSelection selection) {
  switch (selection) {
    case SolverSelection::ilqr: return {SolverKind::ilqr};
    case SolverSelection::sqp: return {SolverKind::sqp};
    case SolverSelection::both: return {SolverKind::ilqr, SolverKind::sqp};
  }
  return {};
}

void ExperimentConfig::validate() const {
  if (dt_list.empty()) throw std::invalid_argument("dt list is empty");
  if (!(t_f > 0.0) || !std::isfinite(t_f)) throw std::invalid_argument("t_f must be > 0");
  for (double dt : dt_list) horizon_steps(t_f, dt);
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (!(init_std >= 0.0) || !std::isfinite(init_std)) {
    throw std::invalid_argument("init_std must be >= 0");
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(cluster.cost_rel_tol >= 0.0) || !(cluster.traj_tol >= 0.0)) {
    throw std::invalid_argument("cluster tolerances must be >= 0");
  }
  if (scaling_repetitions < 1) throw std::invalid_argument("scaling.repetitions must be >= 1");
  for (int n : scaling_horizons) {
    if (n < 1) throw std::invalid_argument("scaling horizons must be >= 1");
  }
  ilqr.validate();
  sqp.validate();
  const auto sys = make_system(*this);
  if (x0 && x0->size() != sys->state_dim()) {
    throw std::invalid_argument(fmt::format("x0 has {} entries, {} needs {}", x0->size(),
                                            sys->name(), sys->state_dim()));
  }
  make_cost(*this);
}

std::unique_ptr<ControlAffineSystem> make_system(const ExperimentConfig& config) {
  switch (config.system) {
    case SystemKind::pendulum: return std::make_unique<PendulumModel>(config.pendulum);
    case SystemKind::cartpole: return std::make_unique<CartpoleModel>(config.cartpole);
    case SystemKind::scalar_custom: return std::make_unique<ScalarSineModel>(config.scalar);
  }
  throw std::invalid_argument("unknown system");
}

QuadraticCost make_cost(const ExperimentConfig& config) {
  const auto sys = make_system(config);
  const int n = sys->state_dim();
  const int m = sys->control_dim();
  return QuadraticCost(weight_matrix(config.weights.q, n, "Q"),
                       weight_matrix(config.weights.r, m, "R"),
                       weight_matrix(config.weights.s_f, n, "S_f"));
}

Vector initial_state(const ExperimentConfig& config) {
  if (config.x0) return *config.x0;
  switch (config.system) {
    case SystemKind::pendulum: return Vector::Unit(2, 0) * M_PI;
    case SystemKind::cartpole: return Vector::Unit(4, 2) * M_PI;
    case SystemKind::scalar_custom: return Vector::Ones(1);
  }
  throw std::invalid_argument("unknown system");
}

int horizon_steps(double t_f, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  const double ratio = t_f / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw std::invalid_argument(
        fmt::format("t_f = {} is not an integral multiple of dt = {}", t_f, dt));
  }
  return static_cast<int>(rounded);
}

std::uint64_t start_seed(std::uint64_t seed, int start_index) {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(start_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

InitialGuess random_initial_guess(int n, int m, int horizon, const Vector& x0, double sigma,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  InitialGuess guess;
  guess.controls.assign(horizon, Vector::Zero(m));
  guess.states.assign(horizon + 1, Vector::Zero(n));
  // Controls first, so both solvers see the same u_init for a given seed.
  for (Vector& u : guess.controls) {
    for (int j = 0; j < m; ++j) u(j) = sigma * normal(rng);
  }
  for (Vector& x : guess.states) {
    for (int i = 0; i < n; ++i) x(i) = sigma * normal(rng);
  }
  guess.states.front() = x0;
  return guess;
}

RunRecord run_single(const ExperimentConfig& config, SolverKind solver, double dt,
                     int start_index) {
  const auto sys = make_system(config);
  const QuadraticCost cost = make_cost(config);
  const Vector x0 = initial_state(config);
  const int N = horizon_steps(config.t_f, dt);

  RunRecord rec;
  rec.start_index = start_index;
  rec.seed = start_seed(config.seed, start_index);
  const InitialGuess guess = random_initial_guess(sys->state_dim(), sys->control_dim(), N, x0,
                                                  config.init_std, rec.seed);
  const TraceCallback trace = [&rec](const IterationRecord& r) { rec.trace.push_back(r); };

  if (solver == SolverKind::ilqr) {
    ILQRSettings settings = config.ilqr;
    settings.trace = trace;
    rec.result = ilqr::solve(*sys, cost, x0, guess.controls, dt, settings);
  } else {
    SQPSettings settings = config.sqp;
    settings.trace = trace;
    rec.result = sqp::solve(*sys, cost, x0, guess.states, guess.controls, dt, settings);
  }
  return rec;
}

double SolutionClusterSet::best_cost() const {
  return clusters.empty() ? kNaN : clusters.front().representative_cost;
}

SolutionClusterSet cluster_solutions(const std::vector<RunRecord>& runs,
                                     const ClusterTolerances& tol) {
  SolutionClusterSet set;
  set.n_starts = static_cast<int>(runs.size());
  if (!runs.empty()) set.dt = runs.front().result.trajectory.dt;

  std::vector<const RunRecord*> converged;
  for (const RunRecord& r : runs) {
    if (r.converged() && std::isfinite(r.result.cost)) {
      converged.push_back(&r);
    } else {
      set.failures.push_back(r);
    }
  }
  std::stable_sort(converged.begin(), converged.end(), [](const RunRecord* a, const RunRecord* b) {
    if (a->result.cost != b->result.cost) return a->result.cost < b->result.cost;
    return a->start_index < b->start_index;
  });

  for (const RunRecord* r : converged) {
    const double J = r->result.cost;
    const std::vector<Vector>& u = r->result.trajectory.controls;
    SolutionCluster* home = nullptr;
    for (SolutionCluster& c : set.clusters) {
      const double J_rep = c.representative_cost;
      const bool cost_close = std::abs(J - J_rep) <= tol.cost_rel_tol * (1.0 + std::min(J, J_rep));
      const std::vector<Vector>& u_rep = c.representative.controls;
      const bool traj_close = rms_distance(u, u_rep) <= tol.traj_tol * (1.0 + rms(u_rep));
      if (cost_close && traj_close) {
        home = &c;
        break;
      }
    }
    if (!home) {
      SolutionCluster c;
      c.representative = r->result.trajectory;
      c.representative_start = r->start_index;
      c.representative_cost = J;
      set.clusters.push_back(std::move(c));
      home = &set.clusters.back();
    }
    home->member_starts.push_back(r->start_index);
    home->member_seeds.push_back(r->seed);
    home->member_costs.push_back(J);
    home->member_residuals.push_back(r->result.stationarity_residual);
  }

  for (SolutionCluster& c : set.clusters) {
    c.mean_cost = std::accumulate(c.member_costs.begin(), c.member_costs.end(), 0.0) /
                  static_cast<double>(c.member_costs.size());
  }
  return set;
}

MultistartOutput run_multistart(const ExperimentConfig& config, SolverKind solver, double dt) {
  return run_multistart(config, solver, dt, nullptr);
}

MultistartOutput run_multistart(const ExperimentConfig& config, SolverKind solver, double dt,
                                const ProgressCallback& progress) {
  config.validate();
  horizon_steps(config.t_f, dt);

  MultistartOutput out;
  out.runs.resize(config.n_starts);
  std::atomic<int> next{0};
  std::mutex mutex;
  std::exception_ptr error;

  const auto worker = [&] {
    for (int i = next++; i < config.n_starts; i = next++) {
      try {
        RunRecord rec = run_single(config, solver, dt, i);
        std::lock_guard lock(mutex);
        if (progress) progress(rec, solver, dt);
        out.runs[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const int workers = std::min(config.workers, config.n_starts);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  out.clusters = cluster_solutions(out.runs, config.cluster);
  out.clusters.dt = dt;
  out.clusters.solver = solver;
  return out;
}

StuckCheck check_stationary_under_ilqr(const ExperimentConfig& config,
                                       const SolutionCluster& representative, double dt,
                                       int cluster_id) {
  const auto sys = make_system(config);
  const QuadraticCost cost = make_cost(config);
  const Vector x0 = initial_state(config);

  const SolverResult r =
      ilqr::solve(*sys, cost, x0, representative.representative.controls, dt, config.ilqr);
  StuckCheck check;
  check.cluster_id = cluster_id;
  check.cluster_cost = representative.representative_cost;
  check.ilqr_cost = r.cost;
  check.relative_change = std::abs(r.cost - check.cluster_cost) / std::abs(check.cluster_cost);
  check.residual = r.stationarity_residual;
  check.termination = r.termination;
  check.stationary = check.relative_change <= 1e-4 &&
                     check.residual <= config.ilqr.stationarity_tol;
  return check;
}

CrossCheckReport cross_check(const ExperimentConfig& config, const ProgressCallback& progress) {
  config.validate();
  CrossCheckReport report;
  for (double dt : config.dt_list) {
    CrossCheckRow row;
    row.dt = dt;
    row.ilqr = run_multistart(config, SolverKind::ilqr, dt, progress).clusters;
    row.sqp = run_multistart(config, SolverKind::sqp, dt, progress).clusters;
    const double j_sqp = row.sqp.best_cost();
    row.relative_gap = (row.ilqr.best_cost() - j_sqp) / j_sqp;
    for (std::size_t c = 0; c < row.sqp.clusters.size(); ++c) {
      row.stuck.push_back(
          check_stationary_under_ilqr(config, row.sqp.clusters[c], dt, static_cast<int>(c)));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need at least two paired samples");
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog_slope: samples must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: x values are all equal");
  return sxy / sxx;
}

ScalingReport measure_scaling(const std::function<std::function<void()>(int)>& make_workload,
                              const std::vector<int>& horizons, int repetitions) {
  if (horizons.size() < 2) throw std::invalid_argument("measure_scaling: need >= 2 horizons");
  if (repetitions < 1) throw std::invalid_argument("measure_scaling: repetitions must be >= 1");
  using Clock = std::chrono::steady_clock;

  ScalingReport report;
  std::vector<double> xs, ys;
  for (int N : horizons) {
    const std::function<void()> work = make_workload(N);
    work();  // warm-up
    ScalingPoint p;
    p.horizon = N;
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = Clock::now();
      work();
      p.samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    p.median_seconds = median(p.samples);
    // Keeps the log-log fit defined for workloads below the clock resolution.
    xs.push_back(N);
    ys.push_back(std::max(p.median_seconds, 1e-9));
    report.points.push_back(std::move(p));
  }
  report.slope = fit_loglog_slope(xs, ys);
  return report;
}

ScalingReport measure_scaling(const ExperimentConfig& config, SolverKind solver,
                              const std::vector<int>& horizons) {
  const std::shared_ptr<const ControlAffineSystem> sys = make_system(config);
  const auto cost = std::make_shared<const QuadraticCost>(make_cost(config));
  const Vector x0 = initial_state(config);
  const double dt = config.dt_list.back();

  const auto make_workload = [&](int N) -> std::function<void()> {
    const InitialGuess guess = random_initial_guess(sys->state_dim(), sys->control_dim(), N, x0,
                                                    config.init_std, start_seed(config.seed, N));
    if (solver == SolverKind::ilqr) {
      auto traj = std::make_shared<const Trajectory>(rollout(*sys, x0, guess.controls, dt));
      return [sys, cost, traj] {
        const auto lin = linearize_trajectory(*sys, *traj);
        const CostQuadratization quad = quadratize(*cost, *traj);
        const auto gains = ilqr::backward_pass(*traj, lin, quad, 0.0);
        if (gains) {
          const auto next = ilqr::forward_pass(*sys, *traj, *gains, 1.0);
          if (next) std::atomic_signal_fence(std::memory_order_seq_cst);
        }
      };
    }
    const Trajectory traj{dt, guess.states, guess.controls};
    auto qp = std::make_shared<const QPSubproblem>(sqp::build_qp(*sys, *cost, traj));
    return [qp] {
      const auto sol = sqp::solve_eq_qp(*qp);
      if (sol) std::atomic_signal_fence(std::memory_order_seq_cst);
    };
  };
  return measure_scaling(make_workload, horizons, config.scaling_repetitions);
}

std::vector<int> default_scaling_horizons(SolverKind solver) {
  if (solver == SolverKind::ilqr) return {100, 200, 400, 800, 1600};
  return {100, 200, 400, 800};
}

}  // namespace octrl
