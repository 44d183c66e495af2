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

// octrl command-line front end.
//
//   octrl solve           one solver run from one random start
//   octrl campaign        multi-start runs over a dt sweep, clustered
//   octrl characteristics scalar shooting + uniqueness scan
//   octrl scaling         per-iteration runtime versus horizon
//
// Exit status: 0 success, 1 solver failure, 2 configuration error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "octrl/config.hpp"
#include "octrl/experiments.hpp"
#include "octrl/report.hpp"

namespace fs = std::filesystem;
using namespace octrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitConfigError = 2;

struct Flags {
  std::string config_path;
  std::string system, solver, out = "octrl-out";
  std::vector<std::string> dt;
  std::string tf, starts, seed, sigma, workers;
  int start = 0;
};

void add_common(CLI::App* cmd, Flags& f, bool campaign_flags) {
  cmd->add_option("--config", f.config_path, "key = value configuration file");
  cmd->add_option("--system", f.system, "pendulum | cartpole | scalar-custom");
  cmd->add_option("--solver", f.solver, "ilqr | sqp | both");
  cmd->add_option("--dt", f.dt, "time step (repeatable)");
  cmd->add_option("--tf", f.tf, "horizon in seconds");
  cmd->add_option("--seed", f.seed, "campaign seed");
  cmd->add_option("--sigma", f.sigma, "std of the Gaussian initial guess");
  cmd->add_option("--out", f.out, "output directory");
  if (campaign_flags) {
    cmd->add_option("--starts", f.starts, "number of random starts");
    cmd->add_option("--workers", f.workers, "parallel solves (default: $OCTRL_WORKERS or 1)");
  }
}

std::string join_dt(const std::vector<std::string>& dts) {
  std::string s;
  for (std::size_t i = 0; i < dts.size(); ++i) s += (i ? "," : "") + dts[i];
  return s;
}

// defaults < $OCTRL_WORKERS < config file < flags
AppConfig build_config(const Flags& f) {
  AppConfig config;
  if (const char* env = std::getenv("OCTRL_WORKERS"); env && *env) {
    try {
      apply_setting(config, "workers", env);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("OCTRL_WORKERS: {}", e.what()));
    }
  }
  if (!f.config_path.empty()) apply_config_file(config, f.config_path);

  const auto flag = [&](const char* name, const char* key, const std::string& value) {
    if (value.empty()) return;
    try {
      apply_setting(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("--{}: {}", name, e.what()));
    }
  };
  flag("system", "system", f.system);
  flag("solver", "solver", f.solver);
  flag("dt", "dt", join_dt(f.dt));
  flag("tf", "t_f", f.tf);
  flag("starts", "n_starts", f.starts);
  flag("seed", "seed", f.seed);
  flag("sigma", "init_std", f.sigma);
  flag("workers", "workers", f.workers);
  config.experiment.validate();
  config.characteristics.validate();
  return config;
}

void echo_config(const AppConfig& config, const fs::path& out) {
  report::write_file_atomic(out / "config.txt", effective_config_text(config));
}

int run_solve(const AppConfig& app, const Flags& f, bool to_dir) {
  const ExperimentConfig& config = app.experiment;
  const double dt = config.dt_list.front();
  bool ok = true;
  for (SolverKind solver : solvers_of(config.solver)) {
    const RunRecord run = run_single(config, solver, dt, f.start);
    const std::string payload = report::solve_json(config, solver, dt, run);
    if (to_dir) {
      const fs::path out = f.out;
      report::write_file_atomic(out / fmt::format("solve_{}.json", to_string(solver)), payload);
      report::write_file_atomic(out / "trace" / (report::run_id(solver, dt, f.start) + ".csv"),
                                report::trace_csv(run.trace));
    } else {
      std::cout << payload;
    }
    fmt::print(stderr, "{} dt={} J={} iterations={} termination={} residual={:.3e}\n",
               to_string(solver), dt, report::number(run.result.cost), run.result.iterations,
               to_string(run.result.termination), run.result.stationarity_residual);
    ok = ok && run.converged();
  }
  if (to_dir) echo_config(app, f.out);
  return ok ? kExitOk : kExitSolverFailure;
}

int run_campaign(const AppConfig& app, const Flags& f) {
  const ExperimentConfig& config = app.experiment;
  const fs::path out = f.out;
  const ProgressCallback log = [](const RunRecord& r, SolverKind solver, double dt) {
    fmt::print(stderr, "[{} dt={}] start {:3d} J={} it={} {} residual={:.3e}\n",
               to_string(solver), dt, r.start_index, report::number(r.result.cost),
               r.result.iterations, to_string(r.result.termination),
               r.result.stationarity_residual);
  };

  std::vector<SolutionClusterSet> sets;
  bool any_empty = false;
  const auto record = [&](const MultistartOutput& ms) {
    for (const RunRecord& r : ms.runs) {
      report::write_file_atomic(
          out / "trace" / (report::run_id(ms.clusters.solver, ms.clusters.dt, r.start_index) +
                           ".csv"),
          report::trace_csv(r.trace));
    }
    any_empty = any_empty || ms.clusters.clusters.empty();
    sets.push_back(ms.clusters);
  };

  if (config.solver == SolverSelection::both) {
    CrossCheckReport cc;
    for (double dt : config.dt_list) {
      CrossCheckRow row;
      row.dt = dt;
      const MultistartOutput il = run_multistart(config, SolverKind::ilqr, dt, log);
      const MultistartOutput sq = run_multistart(config, SolverKind::sqp, dt, log);
      record(il);
      record(sq);
      row.ilqr = il.clusters;
      row.sqp = sq.clusters;
      row.relative_gap = (row.ilqr.best_cost() - row.sqp.best_cost()) / row.sqp.best_cost();
      for (std::size_t c = 0; c < row.sqp.clusters.size(); ++c) {
        row.stuck.push_back(check_stationary_under_ilqr(config, row.sqp.clusters[c], dt,
                                                        static_cast<int>(c)));
      }
      cc.rows.push_back(std::move(row));
    }
    report::write_file_atomic(out / "cross_check.csv", report::cross_check_csv(cc));
  } else {
    for (double dt : config.dt_list) {
      record(run_multistart(config, solvers_of(config.solver).front(), dt, log));
    }
  }

  report::write_file_atomic(out / "clusters.json", report::clusters_json(config, sets));
  const std::string summary = report::summary_csv(sets);
  report::write_file_atomic(out / "summary.csv", summary);
  echo_config(app, out);
  std::cout << summary;
  return any_empty ? kExitSolverFailure : kExitOk;
}

int run_characteristics(const AppConfig& app, const Flags& f) {
  namespace ch = octrl::characteristics;
  const CharacteristicsConfig& c = app.characteristics;
  const ch::ScalarSystem sys = c.system();
  const fs::path out = f.out;

  const ch::UniquenessReport uniq =
      ch::verify_uniqueness(sys, c.x0, c.t_f, c.terminal_grid(), c.dt_int);
  report::write_file_atomic(out / "uniqueness.csv", report::uniqueness_csv(uniq));
  const ch::ShootingResult shot = ch::solve_tpbvp_shooting(sys, c.x0, c.t_f, c.dt_int, c.shooting);
  if (shot.found) report::write_file_atomic(out / "shooting.csv", report::curve_csv(shot.curve));
  echo_config(app, out);

  fmt::print("monotone: {}, brackets: {}\n", uniq.monotone ? "yes" : "no", uniq.brackets);
  if (!uniq.violation.empty()) fmt::print("violation: {}\n", uniq.violation);
  if (!shot.found) {
    fmt::print("shooting: no bracket in [{}, {}]\n", c.x0 - c.shooting.search_half_width,
               c.x0 + c.shooting.search_half_width);
    return kExitSolverFailure;
  }
  fmt::print("shooting: x_tf = {}, lambda(0) = {}, roots = {}, residual = {:.3e}\n",
             report::number(shot.x_tf), report::number(shot.curve.initial_costate()),
             shot.roots.size(), ch::stationarity_residual(sys, shot.curve));
  return kExitOk;
}

int run_scaling(const AppConfig& app, const Flags& f) {
  const ExperimentConfig& config = app.experiment;
  const fs::path out = f.out;
  std::string timing;
  for (SolverKind solver : solvers_of(config.solver)) {
    const std::vector<int> horizons = config.scaling_horizons.empty()
                                          ? default_scaling_horizons(solver)
                                          : config.scaling_horizons;
    const ScalingReport rep = measure_scaling(config, solver, horizons);
    std::string csv = report::timing_csv(solver, rep);
    if (!timing.empty()) csv.erase(0, csv.find('\n') + 1);  // one header per file
    timing += csv;
    fmt::print("{}: slope {:.3f}\n", to_string(solver), rep.slope);
  }
  report::write_file_atomic(out / "timing.csv", timing);
  echo_config(app, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory optimization experiments: iLQR, SQP, and scalar characteristics"};
  app.require_subcommand(1);

  Flags flags;
  CLI::App* solve = app.add_subcommand("solve", "single solve from one random start");
  add_common(solve, flags, false);
  solve->add_option("--start", flags.start, "start index (selects the random guess)")
      ->check(CLI::NonNegativeNumber);
  CLI::App* campaign = app.add_subcommand("campaign", "multi-start campaign over the dt sweep");
  add_common(campaign, flags, true);
  CLI::App* chars = app.add_subcommand("characteristics", "scalar shooting and uniqueness scan");
  chars->add_option("--config", flags.config_path, "key = value configuration file");
  chars->add_option("--out", flags.out, "output directory");
  CLI::App* scaling = app.add_subcommand("scaling", "per-iteration runtime versus horizon");
  add_common(scaling, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  AppConfig config;
  try {
    config = build_config(flags);
  } catch (const std::exception& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfigError;
  }

  try {
    if (solve->parsed()) return run_solve(config, flags, solve->count("--out") > 0);
    if (campaign->parsed()) return run_campaign(config, flags);
    if (chars->parsed()) return run_characteristics(config, flags);
    return run_scaling(config, flags);
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitSolverFailure;
  }
}
