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

#include <chrono>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "octrl/experiments.hpp"
#include "octrl/report.hpp"

using namespace octrl;

namespace {

RunRecord fake_run(int index, double cost, double control_level,
                   Termination t = Termination::converged) {
  RunRecord r;
  r.start_index = index;
  r.seed = 100 + index;
  r.result.cost = cost;
  r.result.termination = t;
  r.result.stationarity_residual = 1e-6;
  r.result.trajectory.dt = 0.1;
  r.result.trajectory.states.assign(6, Vector::Zero(2));
  r.result.trajectory.controls.assign(5, Vector::Constant(1, control_level));
  return r;
}

ExperimentConfig small_pendulum() {
  ExperimentConfig c;
  c.system = SystemKind::pendulum;
  c.dt_list = {0.2};
  c.t_f = 2.0;
  c.n_starts = 4;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Horizon, IntegralRatiosOnly) {
  EXPECT_EQ(horizon_steps(3.0, 0.2), 15);
  EXPECT_EQ(horizon_steps(3.0, 0.01), 300);
  EXPECT_EQ(horizon_steps(0.3, 0.1), 3);
  EXPECT_THROW(horizon_steps(3.0, 0.07), std::invalid_argument);
  EXPECT_THROW(horizon_steps(3.0, 0.0), std::invalid_argument);
  EXPECT_THROW(horizon_steps(0.05, 0.1), std::invalid_argument);
}

TEST(Config, ValidationCatchesInconsistencies) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.t_f = 2.95;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.n_starts = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.x0 = Vector::Zero(2);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.weights.q = {1, 2, 3};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.weights.q = {1, 2, 3, 4};
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, DefaultInitialStatesHang) {
  ExperimentConfig c;
  EXPECT_EQ(initial_state(c), Vector::Unit(4, 2) * M_PI);
  c.system = SystemKind::pendulum;
  EXPECT_EQ(initial_state(c), Vector::Unit(2, 0) * M_PI);
  EXPECT_EQ(parse_system("scalar-custom"), SystemKind::scalar_custom);
  EXPECT_THROW(parse_system("acrobot"), std::invalid_argument);
  EXPECT_THROW(parse_solver("ipopt"), std::invalid_argument);
}

TEST(Seeds, DeterministicAndDistinct) {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(start_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(start_seed(7, 3), start_seed(7, 3));
  EXPECT_NE(start_seed(7, 3), start_seed(8, 3));

  const InitialGuess a = random_initial_guess(4, 1, 10, Vector::Ones(4), 1.0, 42);
  const InitialGuess b = random_initial_guess(4, 1, 10, Vector::Ones(4), 1.0, 42);
  EXPECT_EQ(a.states.front(), Vector::Ones(4));
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.controls[k], b.controls[k]);
  EXPECT_EQ(a.states.size(), 11u);
}

TEST(Clustering, IdenticalResultsFormOneCluster) {
  const SolutionClusterSet s = cluster_solutions({fake_run(0, 5.0, 1.0), fake_run(1, 5.0, 1.0)}, {});
  ASSERT_EQ(s.clusters.size(), 1u);
  EXPECT_EQ(s.clusters[0].size(), 2);
}

TEST(Clustering, SeparatesWidelyDifferentCosts) {
  const SolutionClusterSet s =
      cluster_solutions({fake_run(0, 2.05265e4, 1.0), fake_run(1, 1.941844e3, 1.0)}, {});
  ASSERT_EQ(s.clusters.size(), 2u);
  EXPECT_EQ(s.clusters[0].representative_cost, 1.941844e3);
  EXPECT_EQ(s.clusters[0].representative_start, 1);
}

TEST(Clustering, RecoversPlantedLevels) {
  std::vector<RunRecord> runs;
  const double levels[] = {300.0, 100.0, 200.0};
  for (int i = 0; i < 30; ++i) {
    const double level = levels[i % 3];
    runs.push_back(fake_run(i, level * (1 + 1e-5 * (i % 5)), level / 100 + 1e-5 * (i % 7)));
  }
  runs.push_back(fake_run(30, 50.0, 0.0, Termination::max_iterations));
  const SolutionClusterSet s = cluster_solutions(runs, {});
  ASSERT_EQ(s.clusters.size(), 3u);
  EXPECT_EQ(s.failures.size(), 1u);
  int members = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(s.clusters[c].size(), 10);
    members += s.clusters[c].size();
    if (c > 0) EXPECT_LT(s.clusters[c - 1].representative_cost, s.clusters[c].representative_cost);
    for (double j : s.clusters[c].member_costs) EXPECT_GE(j, s.clusters[c].representative_cost);
  }
  EXPECT_EQ(members, 30);
}

TEST(Clustering, EqualCostDifferentControlsStaySeparate) {
  const SolutionClusterSet s = cluster_solutions({fake_run(0, 10.0, 1.0), fake_run(1, 10.0, -1.0)}, {});
  EXPECT_EQ(s.clusters.size(), 2u);
}

TEST(Multistart, SingleStartGivesOneClusterOrOneFailure) {
  ExperimentConfig c = small_pendulum();
  c.n_starts = 1;
  const MultistartOutput out = run_multistart(c, SolverKind::ilqr, 0.2);
  EXPECT_EQ(out.clusters.clusters.size() + out.clusters.failures.size(), 1u);
  EXPECT_EQ(out.runs.size(), 1u);
}

TEST(Multistart, WorkerCountDoesNotChangeOutput) {
  ExperimentConfig c = small_pendulum();
  c.n_starts = 6;
  const MultistartOutput serial = run_multistart(c, SolverKind::sqp, 0.2);
  c.workers = 3;
  const MultistartOutput parallel = run_multistart(c, SolverKind::sqp, 0.2);
  EXPECT_EQ(report::clusters_json(c, {serial.clusters}), report::clusters_json(c, {parallel.clusters}));
  EXPECT_EQ(report::summary_csv({serial.clusters}), report::summary_csv({parallel.clusters}));
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(serial.runs[i].start_index, i);
    EXPECT_EQ(report::trace_csv(serial.runs[i].trace), report::trace_csv(parallel.runs[i].trace));
  }
}

TEST(Multistart, RepresentativesAreStationary) {
  const ExperimentConfig c = small_pendulum();
  for (SolverKind solver : {SolverKind::ilqr, SolverKind::sqp}) {
    const MultistartOutput out = run_multistart(c, solver, 0.2);
    ASSERT_FALSE(out.clusters.clusters.empty());
    for (const SolutionCluster& cl : out.clusters.clusters) {
      for (double r : cl.member_residuals) EXPECT_LE(r, c.ilqr.stationarity_tol);
    }
  }
}

TEST(CrossCheck, PendulumSolversAgree) {
  ExperimentConfig c = small_pendulum();
  c.solver = SolverSelection::both;
  const CrossCheckReport rep = cross_check(c);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_LE(std::abs(rep.rows[0].relative_gap), 1e-3);
  ASSERT_FALSE(rep.rows[0].stuck.empty());
  for (const StuckCheck& s : rep.rows[0].stuck) EXPECT_TRUE(s.stationary);
  EXPECT_NE(report::cross_check_csv(rep).find("yes"), std::string::npos);
}

TEST(Scaling, LogLogSlopeOfExactPowerLaws) {
  EXPECT_NEAR(fit_loglog_slope({1, 2, 4, 8}, {3, 24, 192, 1536}), 3.0, 1e-12);
  EXPECT_NEAR(fit_loglog_slope({10, 100, 1000}, {5, 5, 5}), 0.0, 1e-12);
  EXPECT_THROW(fit_loglog_slope({1}, {1}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1, 0}), std::invalid_argument);
}

TEST(Scaling, ConstantTimeWorkloadHasFlatSlope) {
  const auto make = [](int) {
    return [] { std::this_thread::sleep_for(std::chrono::milliseconds(2)); };
  };
  const ScalingReport rep = measure_scaling(make, {50, 100, 200, 400}, 5);
  EXPECT_NEAR(rep.slope, 0.0, 0.15);
  EXPECT_EQ(rep.points.size(), 4u);
  EXPECT_EQ(rep.points[0].samples.size(), 5u);
}
