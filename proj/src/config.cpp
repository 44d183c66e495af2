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

#include "octrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/core.h>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace octrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("'{}' is not a finite number", s));
  }
  return v;
}

long long parse_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("'{}' is not an integer", s));
  }
  return v;
}

int parse_int(std::string_view s) {
  const long long v = parse_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(fmt::format("'{}' is out of range", trim(s)));
  }
  return static_cast<int>(v);
}

std::uint64_t parse_seed(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("'{}' is not a non-negative integer", s));
  }
  return v;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_int(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

struct Field {
  std::function<void(AppConfig&, std::string_view)> set;
  std::function<std::string(const AppConfig&)> get;
};

template <class Access>
Field real(Access access) {
  return {[access](AppConfig& c, std::string_view v) { access(c) = parse_double(v); },
          [access](const AppConfig& c) { return num(access(const_cast<AppConfig&>(c))); }};
}

template <class Access>
Field integer(Access access) {
  return {[access](AppConfig& c, std::string_view v) { access(c) = parse_int(v); },
          [access](const AppConfig& c) {
            return std::to_string(access(const_cast<AppConfig&>(c)));
          }};
}

template <class Access>
Field real_list(Access access) {
  return {[access](AppConfig& c, std::string_view v) { access(c) = parse_list(v); },
          [access](const AppConfig& c) { return join(access(const_cast<AppConfig&>(c))); }};
}

#define OCTRL_FIELD(expr) [](AppConfig & c) -> auto& { return c.expr; }

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["system"] = {[](AppConfig& c, std::string_view v) {
                     c.experiment.system = parse_system(trim(v));
                   },
                   [](const AppConfig& c) { return std::string(to_string(c.experiment.system)); }};
    t["solver"] = {[](AppConfig& c, std::string_view v) {
                     c.experiment.solver = parse_solver(trim(v));
                   },
                   [](const AppConfig& c) { return std::string(to_string(c.experiment.solver)); }};
    t["dt"] = real_list(OCTRL_FIELD(experiment.dt_list));
    t["t_f"] = real(OCTRL_FIELD(experiment.t_f));
    t["x0"] = {[](AppConfig& c, std::string_view v) {
                 const std::vector<double> x = parse_list(v);
                 c.experiment.x0 = Eigen::Map<const Vector>(x.data(), x.size());
               },
               [](const AppConfig& c) {
                 const Vector x = initial_state(c.experiment);
                 return join(std::vector<double>(x.data(), x.data() + x.size()));
               }};
    t["n_starts"] = integer(OCTRL_FIELD(experiment.n_starts));
    t["seed"] = {[](AppConfig& c, std::string_view v) { c.experiment.seed = parse_seed(v); },
                 [](const AppConfig& c) { return std::to_string(c.experiment.seed); }};
    t["init_std"] = real(OCTRL_FIELD(experiment.init_std));
    t["workers"] = integer(OCTRL_FIELD(experiment.workers));

    t["model.pendulum.rod_length"] = real(OCTRL_FIELD(experiment.pendulum.rod_length));
    t["model.pendulum.mass"] = real(OCTRL_FIELD(experiment.pendulum.mass));
    t["model.pendulum.gravity"] = real(OCTRL_FIELD(experiment.pendulum.gravity));
    t["model.cartpole.cart_mass"] = real(OCTRL_FIELD(experiment.cartpole.cart_mass));
    t["model.cartpole.pole_mass"] = real(OCTRL_FIELD(experiment.cartpole.pole_mass));
    t["model.cartpole.pole_length"] = real(OCTRL_FIELD(experiment.cartpole.pole_length));
    t["model.cartpole.gravity"] = real(OCTRL_FIELD(experiment.cartpole.gravity));
    t["model.scalar.drift_gain"] = real(OCTRL_FIELD(experiment.scalar.drift_gain));
    t["model.scalar.input_gain"] = real(OCTRL_FIELD(experiment.scalar.input_gain));

    t["cost.Q"] = real_list(OCTRL_FIELD(experiment.weights.q));
    t["cost.R"] = real_list(OCTRL_FIELD(experiment.weights.r));
    t["cost.S_f"] = real_list(OCTRL_FIELD(experiment.weights.s_f));

    t["solver.ilqr.max_iterations"] = integer(OCTRL_FIELD(experiment.ilqr.max_iterations));
    t["solver.ilqr.convergence_tol"] = real(OCTRL_FIELD(experiment.ilqr.convergence_tol));
    t["solver.ilqr.stationarity_tol"] = real(OCTRL_FIELD(experiment.ilqr.stationarity_tol));
    t["solver.ilqr.regularization_init"] =
        real(OCTRL_FIELD(experiment.ilqr.regularization_init));
    t["solver.ilqr.regularization_max"] = real(OCTRL_FIELD(experiment.ilqr.regularization_max));
    t["solver.ilqr.line_search_backtrack"] =
        real(OCTRL_FIELD(experiment.ilqr.line_search_backtrack));
    t["solver.ilqr.line_search_min_step"] =
        real(OCTRL_FIELD(experiment.ilqr.line_search_min_step));

    t["solver.sqp.max_iterations"] = integer(OCTRL_FIELD(experiment.sqp.max_iterations));
    t["solver.sqp.kkt_tol"] = real(OCTRL_FIELD(experiment.sqp.kkt_tol));
    t["solver.sqp.stationarity_tol"] = real(OCTRL_FIELD(experiment.sqp.stationarity_tol));
    t["solver.sqp.merit_penalty_init"] = real(OCTRL_FIELD(experiment.sqp.merit_penalty_init));
    t["solver.sqp.line_search_backtrack"] =
        real(OCTRL_FIELD(experiment.sqp.line_search_backtrack));
    t["solver.sqp.line_search_min_step"] =
        real(OCTRL_FIELD(experiment.sqp.line_search_min_step));
    t["solver.sqp.armijo"] = real(OCTRL_FIELD(experiment.sqp.armijo));

    t["cluster.cost_rel_tol"] = real(OCTRL_FIELD(experiment.cluster.cost_rel_tol));
    t["cluster.traj_tol"] = real(OCTRL_FIELD(experiment.cluster.traj_tol));

    t["scaling.horizons"] = {
        [](AppConfig& c, std::string_view v) {
          c.experiment.scaling_horizons = trim(v).empty() ? std::vector<int>{} : parse_int_list(v);
        },
        [](const AppConfig& c) {
          return fmt::format("{}", fmt::join(c.experiment.scaling_horizons, ", "));
        }};
    t["scaling.repetitions"] = integer(OCTRL_FIELD(experiment.scaling_repetitions));

    t["characteristics.a"] = real(OCTRL_FIELD(characteristics.a));
    t["characteristics.b"] = real(OCTRL_FIELD(characteristics.b));
    t["characteristics.q"] = real(OCTRL_FIELD(characteristics.q));
    t["characteristics.r"] = real(OCTRL_FIELD(characteristics.r));
    t["characteristics.s_f"] = real(OCTRL_FIELD(characteristics.s_f));
    t["characteristics.x0"] = real(OCTRL_FIELD(characteristics.x0));
    t["characteristics.t_f"] = real(OCTRL_FIELD(characteristics.t_f));
    t["characteristics.dt_int"] = real(OCTRL_FIELD(characteristics.dt_int));
    t["characteristics.grid_min"] = real(OCTRL_FIELD(characteristics.grid_min));
    t["characteristics.grid_max"] = real(OCTRL_FIELD(characteristics.grid_max));
    t["characteristics.grid_points"] = integer(OCTRL_FIELD(characteristics.grid_points));
    t["characteristics.search_half_width"] =
        real(OCTRL_FIELD(characteristics.shooting.search_half_width));
    t["characteristics.scan_points"] = integer(OCTRL_FIELD(characteristics.shooting.scan_points));
    t["characteristics.terminal_tol"] = real(OCTRL_FIELD(characteristics.shooting.terminal_tol));
    return t;
  }();
  return table;
}

#undef OCTRL_FIELD

}  // namespace

characteristics::ScalarSystem CharacteristicsConfig::system() const {
  return characteristics::sine_system(a, b, q, r, s_f);
}

std::vector<double> CharacteristicsConfig::terminal_grid() const {
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    grid[i] = grid_points == 1 ? grid_min
                               : grid_min + (grid_max - grid_min) * i / (grid_points - 1);
  }
  return grid;
}

void CharacteristicsConfig::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("characteristics.r must be > 0");
  if (!(t_f > 0.0)) throw std::invalid_argument("characteristics.t_f must be > 0");
  if (!(dt_int > 0.0)) throw std::invalid_argument("characteristics.dt_int must be > 0");
  if (grid_points < 1) throw std::invalid_argument("characteristics.grid_points must be >= 1");
  if (!(grid_max >= grid_min)) throw std::invalid_argument("characteristics grid is empty");
  if (shooting.scan_points < 2) {
    throw std::invalid_argument("characteristics.scan_points must be >= 2");
  }
  if (!(shooting.search_half_width > 0.0)) {
    throw std::invalid_argument("characteristics.search_half_width must be > 0");
  }
}

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, message)),
      source_(std::move(source)),
      line_(line) {}

void apply_setting(AppConfig& config, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(trim(key));
  if (it == table.end()) throw std::invalid_argument(fmt::format("unknown key '{}'", trim(key)));
  it->second.set(config, value);
}

void apply_config_text(AppConfig& config, std::string_view text, const std::string& source) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source, line_no, fmt::format("expected 'key = value', got '{}'", line));
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, line_no, e.what());
    }
  }
}

void apply_config_file(AppConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(config, buf.str(), path.string());
}

std::string effective_config_text(const AppConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    out += fmt::format("{} = {}\n", key, field.get(config));
  }
  return out;
}

}  // namespace octrl
