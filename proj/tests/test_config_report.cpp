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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "octrl/config.hpp"
#include "octrl/report.hpp"

using namespace octrl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("octrl_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ConfigText, ParsesDottedKeysAndLists) {
  AppConfig c;
  apply_config_text(c,
                    "# campaign\n"
                    "system = pendulum\n"
                    "solver = sqp   # trailing comment\n"
                    "dt = 0.2, 0.1\n"
                    "t_f = 2\n"
                    "cost.Q = 100, 50\n"
                    "solver.ilqr.max_iterations = 42\n"
                    "model.pendulum.gravity = 9.8\n"
                    "\n"
                    "seed = 18446744073709551615\n",
                    "inline");
  EXPECT_EQ(c.experiment.system, SystemKind::pendulum);
  EXPECT_EQ(c.experiment.solver, SolverSelection::sqp);
  EXPECT_EQ(c.experiment.dt_list, (std::vector<double>{0.2, 0.1}));
  EXPECT_EQ(c.experiment.t_f, 2.0);
  EXPECT_EQ(c.experiment.weights.q, (std::vector<double>{100, 50}));
  EXPECT_EQ(c.experiment.ilqr.max_iterations, 42);
  EXPECT_EQ(c.experiment.pendulum.gravity, 9.8);
  EXPECT_EQ(c.experiment.seed, 18446744073709551615ULL);
  EXPECT_NO_THROW(c.experiment.validate());
}

TEST(ConfigText, ErrorsAreLineAnchored) {
  AppConfig c;
  try {
    apply_config_text(c, "system = cartpole\n\nsolver.sqp.kkt_tol = tiny\n", "run.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("run.cfg:3:"), std::string::npos);
  }
  EXPECT_THROW(apply_config_text(c, "no equals sign\n", "x"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "bogus.key = 1\n", "x"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "system = acrobot\n", "x"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "n_starts = 3.5\n", "x"), ConfigError);
}

TEST(ConfigText, EffectiveConfigRoundTrips) {
  AppConfig a;
  apply_config_text(a, "system = pendulum\ndt = 0.1\nt_f = 0.30000000000000004\nx0 = 1, -2\n", "a");
  const std::string text = effective_config_text(a);
  AppConfig b;
  apply_config_text(b, text, "echo");
  EXPECT_EQ(effective_config_text(b), text);
  EXPECT_EQ(b.experiment.t_f, 0.30000000000000004);
  ASSERT_TRUE(b.experiment.x0);
  EXPECT_EQ(*b.experiment.x0, a.experiment.x0.value());
}

TEST(ConfigFile, MissingFileIsAConfigError) {
  AppConfig c;
  EXPECT_THROW(apply_config_file(c, "/nonexistent/octrl.cfg"), ConfigError);
}

TEST(Report, SeventeenSignificantDigits) {
  EXPECT_EQ(report::number(0.1), "0.10000000000000001");
  EXPECT_EQ(report::number(1771.182), "1771.182");
  EXPECT_EQ(report::number(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(std::stod(report::number(M_PI)), M_PI);
  EXPECT_EQ(report::number(NAN), "nan");
}

TEST(Report, SummaryCsvColumns) {
  SolutionClusterSet set;
  set.dt = 0.2;
  set.solver = SolverKind::sqp;
  SolutionCluster c;
  c.representative_cost = 1941.844;
  c.member_starts = {0, 3};
  c.member_costs = {1941.844, 1941.8441};
  c.member_residuals = {1e-7, 2e-7};
  set.clusters.push_back(c);
  EXPECT_EQ(report::summary_csv({set}),
            "dt,solver,cluster_id,cost,members,residual\n"
            "0.20000000000000001,sqp,0,1941.8440000000001,2,1.9999999999999999e-07\n");
}

TEST(Report, AtomicWriteReplacesContent) {
  const fs::path dir = scratch_dir("atomic");
  const fs::path file = dir / "nested" / "a.txt";
  report::write_file_atomic(file, "first");
  report::write_file_atomic(file, "second");
  EXPECT_EQ(slurp(file), "second");
  EXPECT_FALSE(fs::exists(dir / "nested" / "a.txt.tmp"));
  fs::remove_all(dir);
}

TEST(Report, TraceAndRunId) {
  IterationRecord r;
  r.iteration = 2;
  r.cost = 10.5;
  EXPECT_EQ(report::trace_csv({r}),
            "iteration,cost,merit,step,regularization,penalty,residual\n2,10.5,nan,nan,nan,nan,nan\n");
  EXPECT_EQ(report::run_id(SolverKind::ilqr, 0.05, 7), "ilqr_dt0.05_s007");
}
