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

#include <filesystem>
#include <string>
#include <vector>

#include "octrl/characteristics.hpp"
#include "octrl/config.hpp"
#include "octrl/experiments.hpp"

// Text renderings of experiment outputs. Every function is a pure function of
// its inputs, so identical runs give byte-identical files.

namespace octrl::report {

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string number(double v);

/// Writes to a sibling temporary file, then renames it over `path`.
/// Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Full cluster sets, including representative trajectories and failures.
std::string clusters_json(const ExperimentConfig& config,
                          const std::vector<SolutionClusterSet>& sets);

/// dt,solver,cluster_id,cost,members,residual  (residual: worst member).
std::string summary_csv(const std::vector<SolutionClusterSet>& sets);

/// iteration,cost,merit,step,regularization,penalty,residual
std::string trace_csv(const std::vector<IterationRecord>& trace);

/// e.g. "sqp_dt0.2_s007"
std::string run_id(SolverKind solver, double dt, int start_index);

std::string solve_json(const ExperimentConfig& config, SolverKind solver, double dt,
                       const RunRecord& run);

/// Per-dt comparison of the two solvers.
std::string cross_check_csv(const CrossCheckReport& report);

/// solver,horizon,median_seconds,min_seconds,max_seconds
std::string timing_csv(SolverKind solver, const ScalingReport& report);

/// x_tf,x0,lambda0 rows followed by a "# monotone: yes|no, brackets: k" line.
std::string uniqueness_csv(const characteristics::UniquenessReport& report);

/// t,x,lambda,u
std::string curve_csv(const characteristics::CharacteristicCurve& curve);

}  // namespace octrl::report
