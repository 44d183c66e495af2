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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "octrl/characteristics.hpp"
#include "octrl/experiments.hpp"

// Flat key/value configuration:
//
//   # comment
//   system = cartpole
//   dt = 0.2, 0.1
//   cost.Q = 100
//   solver.ilqr.max_iterations = 500
//
// Lists are comma separated. Later assignments override earlier ones.

namespace octrl {

/// Scalar test problem  xdot = a sin x + b u,  l = q x^2,  R = r u^2,  phi = 1/2 s_f x^2.
struct CharacteristicsConfig {
  double a = 1.0;
  double b = 1.0;
  double q = 1.0;
  double r = 5.0;
  double s_f = 0.0;
  double x0 = 1.0;
  double t_f = 2.0;
  double dt_int = 1e-3;
  double grid_min = -2.0 * M_PI;
  double grid_max = 2.0 * M_PI;
  int grid_points = 101;
  characteristics::ShootingOptions shooting;

  characteristics::ScalarSystem system() const;
  std::vector<double> terminal_grid() const;
  void validate() const;
};

struct AppConfig {
  ExperimentConfig experiment;
  CharacteristicsConfig characteristics;
};

/// Parse failure anchored at `source:line`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

/// Throws std::invalid_argument on an unknown key or malformed value.
void apply_setting(AppConfig& config, std::string_view key, std::string_view value);

/// Applies every `key = value` line; throws ConfigError with the offending line.
void apply_config_text(AppConfig& config, std::string_view text, const std::string& source);

void apply_config_file(AppConfig& config, const std::filesystem::path& path);

/// Every key with its current value, one per line, readable by apply_config_text.
std::string effective_config_text(const AppConfig& config);

}  // namespace octrl
