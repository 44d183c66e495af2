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

#include "octrl/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/core.h>
#include <json.hpp>

namespace octrl::report {

namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vectors(const std::vector<Vector>& seq) {
  json out = json::array();
  for (const Vector& v : seq) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(finite_or_null(v(i)));
    out.push_back(std::move(row));
  }
  return out;
}

json trajectory(const Trajectory& traj) {
  return {{"dt", traj.dt}, {"states", vectors(traj.states)}, {"controls", vectors(traj.controls)}};
}

json cluster_set(const SolutionClusterSet& set) {
  json clusters = json::array();
  for (std::size_t c = 0; c < set.clusters.size(); ++c) {
    const SolutionCluster& cl = set.clusters[c];
    json residuals = json::array();
    for (double r : cl.member_residuals) residuals.push_back(finite_or_null(r));
    clusters.push_back({{"cluster_id", c},
                        {"representative_cost", cl.representative_cost},
                        {"mean_cost", cl.mean_cost},
                        {"members", cl.size()},
                        {"representative_start", cl.representative_start},
                        {"member_starts", cl.member_starts},
                        {"member_seeds", cl.member_seeds},
                        {"member_costs", cl.member_costs},
                        {"member_residuals", residuals},
                        {"representative", trajectory(cl.representative)}});
  }
  json failures = json::array();
  for (const RunRecord& f : set.failures) {
    failures.push_back({{"start", f.start_index},
                        {"seed", f.seed},
                        {"termination", to_string(f.result.termination)},
                        {"iterations", f.result.iterations},
                        {"cost", finite_or_null(f.result.cost)},
                        {"residual", finite_or_null(f.result.stationarity_residual)}});
  }
  return {{"dt", set.dt},
          {"solver", to_string(set.solver)},
          {"n_starts", set.n_starts},
          {"converged", set.n_starts - static_cast<int>(set.failures.size())},
          {"clusters", clusters},
          {"failures", failures}};
}

std::string dt_label(double dt) { return fmt::format("{}", dt); }

}  // namespace

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

std::string clusters_json(const ExperimentConfig& config,
                          const std::vector<SolutionClusterSet>& sets) {
  const Vector x0 = initial_state(config);
  json runs = json::array();
  for (const SolutionClusterSet& s : sets) runs.push_back(cluster_set(s));
  const json doc = {{"system", to_string(config.system)},
                    {"t_f", config.t_f},
                    {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                    {"seed", config.seed},
                    {"init_std", config.init_std},
                    {"n_starts", config.n_starts},
                    {"runs", runs}};
  return doc.dump(2) + "\n";
}

std::string summary_csv(const std::vector<SolutionClusterSet>& sets) {
  std::string out = "dt,solver,cluster_id,cost,members,residual\n";
  for (const SolutionClusterSet& s : sets) {
    for (std::size_t c = 0; c < s.clusters.size(); ++c) {
      const SolutionCluster& cl = s.clusters[c];
      const double worst =
          *std::max_element(cl.member_residuals.begin(), cl.member_residuals.end());
      out += fmt::format("{},{},{},{},{},{}\n", number(s.dt), to_string(s.solver), c,
                         number(cl.representative_cost), cl.size(), number(worst));
    }
  }
  return out;
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::string out = "iteration,cost,merit,step,regularization,penalty,residual\n";
  for (const IterationRecord& r : trace) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.iteration, number(r.cost), number(r.merit),
                       number(r.step), number(r.regularization), number(r.penalty),
                       number(r.residual));
  }
  return out;
}

std::string run_id(SolverKind solver, double dt, int start_index) {
  return fmt::format("{}_dt{}_s{:03d}", to_string(solver), dt_label(dt), start_index);
}

std::string solve_json(const ExperimentConfig& config, SolverKind solver, double dt,
                       const RunRecord& run) {
  const SolverResult& r = run.result;
  const json doc = {{"system", to_string(config.system)},
                    {"solver", to_string(solver)},
                    {"dt", dt},
                    {"t_f", config.t_f},
                    {"seed", config.seed},
                    {"start", run.start_index},
                    {"start_seed", run.seed},
                    {"cost", finite_or_null(r.cost)},
                    {"iterations", r.iterations},
                    {"termination", to_string(r.termination)},
                    {"stationarity_residual", finite_or_null(r.stationarity_residual)},
                    {"trajectory", trajectory(r.trajectory)}};
  return doc.dump(2) + "\n";
}

std::string cross_check_csv(const CrossCheckReport& report) {
  std::string out =
      "dt,ilqr_cost,ilqr_clusters,sqp_best_cost,sqp_clusters,relative_gap,"
      "sqp_cluster_id,sqp_cluster_cost,ilqr_restart_cost,relative_change,residual,stationary\n";
  for (const CrossCheckRow& row : report.rows) {
    const std::string head =
        fmt::format("{},{},{},{},{},{}", number(row.dt), number(row.ilqr.best_cost()),
                    row.ilqr.clusters.size(), number(row.sqp.best_cost()),
                    row.sqp.clusters.size(), number(row.relative_gap));
    if (row.stuck.empty()) {
      out += head + ",,,,,,\n";
      continue;
    }
    for (const StuckCheck& s : row.stuck) {
      out += fmt::format("{},{},{},{},{},{},{}\n", head, s.cluster_id, number(s.cluster_cost),
                         number(s.ilqr_cost), number(s.relative_change), number(s.residual),
                         s.stationary ? "yes" : "no");
    }
  }
  return out;
}

std::string timing_csv(SolverKind solver, const ScalingReport& report) {
  std::string out = "solver,horizon,median_seconds,min_seconds,max_seconds\n";
  for (const ScalingPoint& p : report.points) {
    const auto [lo, hi] = std::minmax_element(p.samples.begin(), p.samples.end());
    out += fmt::format("{},{},{},{},{}\n", to_string(solver), p.horizon, number(p.median_seconds),
                       number(*lo), number(*hi));
  }
  out += fmt::format("# slope: {}\n", number(report.slope));
  return out;
}

std::string uniqueness_csv(const characteristics::UniquenessReport& report) {
  std::string out = "x_tf,x0,lambda0\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{}\n", number(row.x_tf), number(row.x0), number(row.lambda0));
  }
  out += fmt::format("# monotone: {}, brackets: {}\n", report.monotone ? "yes" : "no",
                     report.brackets);
  return out;
}

std::string curve_csv(const characteristics::CharacteristicCurve& curve) {
  std::string out = "t,x,lambda,u\n";
  for (std::size_t i = 0; i < curve.time.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", number(curve.time[i]), number(curve.state[i]),
                       number(curve.costate[i]), number(curve.control[i]));
  }
  return out;
}

}  // namespace octrl::report
