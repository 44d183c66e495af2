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

#include "octrl/characteristics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

namespace octrl::characteristics {

namespace {

using Phase = std::array<double, 2>;  // (x, lambda)

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dual_residual(const ScalarSystem& sys, double x, double lambda, double u) {
  return std::abs(sys.R_u(u) + lambda * sys.g(x));
}

}  // namespace

ScalarSystem scalar_lqr(double a, double b, double q, double r, double s_f) {
  ScalarSystem s;
  s.f = [a](double x) { return a * x; };
  s.f_x = [a](double) { return a; };
  s.g = [b](double) { return b; };
  s.g_x = [](double) { return 0.0; };
  s.l = [q](double x) { return q * x * x; };
  s.l_x = [q](double x) { return 2.0 * q * x; };
  s.phi = [s_f](double x) { return 0.5 * s_f * x * x; };
  s.phi_x = [s_f](double x) { return s_f * x; };
  s.R = [r](double u) { return 0.5 * r * u * u; };
  s.R_u = [r](double u) { return r * u; };
  s.R_uu = [r](double) { return r; };
  return s;
}

ScalarSystem sine_system(double a, double b, double q, double r, double s_f) {
  ScalarSystem s;
  s.f = [a](double x) { return a * std::sin(x); };
  s.f_x = [a](double x) { return a * std::cos(x); };
  s.g = [b](double) { return b; };
  s.g_x = [](double) { return 0.0; };
  s.l = [q](double x) { return q * x * x; };
  s.l_x = [q](double x) { return 2.0 * q * x; };
  s.phi = [s_f](double x) { return 0.5 * s_f * x * x; };
  s.phi_x = [s_f](double x) { return s_f * x; };
  s.R = [r](double u) { return r * u * u; };
  s.R_u = [r](double u) { return 2.0 * r * u; };
  s.R_uu = [r](double) { return 2.0 * r; };
  return s;
}

double psi(const ScalarSystem& sys, double z) {
  if (!std::isfinite(z)) throw DomainError("psi: non-finite argument");
  const auto F = [&](double u) { return sys.R_u(u) + z; };

  // R_u is increasing, so expand [lo, hi] until F changes sign.
  double lo = -1.0, hi = 1.0;
  int expansions = 0;
  while (F(lo) > 0.0 || F(hi) < 0.0) {
    if (++expansions > 1000 || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw DomainError("psi: " + std::to_string(z) + " is outside the range of -R_u");
    }
    if (F(lo) > 0.0) lo *= 2.0;
    if (F(hi) < 0.0) hi *= 2.0;
  }

  const double guess = std::clamp(0.0, lo, hi);
  std::uintmax_t max_iter = 200;
  double u = boost::math::tools::newton_raphson_iterate(
      [&](double v) { return std::make_pair(F(v), sys.R_uu(v)); }, guess, lo, hi,
      std::numeric_limits<double>::digits - 2, max_iter);
  // One polishing Newton step; harmless at the root.
  const double curvature = sys.R_uu(u);
  if (curvature > 0.0) {
    const double polished = u - F(u) / curvature;
    if (std::abs(F(polished)) < std::abs(F(u))) u = polished;
  }
  return u;
}

CharacteristicCurve integrate_characteristics_backward(const ScalarSystem& sys, double x_tf,
                                                       double t_f, double dt_int) {
  if (!(t_f > 0.0) || !(dt_int > 0.0) || !std::isfinite(t_f)) {
    throw std::invalid_argument("integrate_characteristics_backward: need t_f > 0, dt_int > 0");
  }
  const auto steps = static_cast<long>(std::ceil(t_f / dt_int - 1e-9));
  const double h = t_f / static_cast<double>(steps);

  const auto rhs = [&sys](const Phase& y, Phase& dydt, double /*t*/) {
    const double x = y[0], lambda = y[1];
    const double u = psi(sys, lambda * sys.g(x));
    dydt[0] = sys.f(x) + sys.g(x) * u;
    dydt[1] = -sys.l_x(x) - lambda * sys.f_x(x) - lambda * sys.g_x(x) * u;
  };

  CharacteristicCurve curve;
  curve.time.reserve(steps + 1);
  curve.state.reserve(steps + 1);
  curve.costate.reserve(steps + 1);

  Phase y{x_tf, sys.phi_x(x_tf)};
  curve.time.push_back(t_f);
  curve.state.push_back(y[0]);
  curve.costate.push_back(y[1]);
  curve.reached_time = t_f;

  boost::numeric::odeint::runge_kutta4<Phase> stepper;
  for (long i = 0; i < steps; ++i) {
    const double t = t_f - static_cast<double>(i) * h;
    try {
      stepper.do_step(rhs, y, t, -h);
    } catch (const DomainError&) {
      y = {kNaN, kNaN};
    }
    if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
      curve.ok = false;
      break;
    }
    const double t_next = (i + 1 == steps) ? 0.0 : t_f - static_cast<double>(i + 1) * h;
    curve.time.push_back(t_next);
    curve.state.push_back(y[0]);
    curve.costate.push_back(y[1]);
    curve.reached_time = t_next;
  }

  std::reverse(curve.time.begin(), curve.time.end());
  std::reverse(curve.state.begin(), curve.state.end());
  std::reverse(curve.costate.begin(), curve.costate.end());
  curve.control.resize(curve.time.size());
  for (std::size_t i = 0; i < curve.time.size(); ++i) {
    curve.control[i] = psi(sys, curve.costate[i] * sys.g(curve.state[i]));
  }
  return curve;
}

ShootingResult solve_tpbvp_shooting(const ScalarSystem& sys, double x0, double t_f,
                                    double dt_int, const ShootingOptions& options) {
  if (options.scan_points < 2) throw std::invalid_argument("shooting: scan_points must be >= 2");
  const auto miss = [&](double x_tf) {
    const CharacteristicCurve c = integrate_characteristics_backward(sys, x_tf, t_f, dt_int);
    return c.ok ? c.initial_state() - x0 : kNaN;
  };

  const double lo = x0 - options.search_half_width;
  const double step = 2.0 * options.search_half_width / (options.scan_points - 1);
  std::vector<double> grid(options.scan_points), values(options.scan_points);
  for (int i = 0; i < options.scan_points; ++i) {
    grid[i] = (i + 1 == options.scan_points) ? x0 + options.search_half_width : lo + i * step;
    values[i] = miss(grid[i]);
  }

  ShootingResult result;
  for (int i = 0; i < options.scan_points; ++i) {
    if (values[i] == 0.0) {
      result.roots.push_back(grid[i]);
      continue;
    }
    if (i + 1 == options.scan_points) break;
    const double fa = values[i], fb = values[i + 1];
    if (!std::isfinite(fa) || !std::isfinite(fb) || fb == 0.0 || (fa > 0.0) == (fb > 0.0)) continue;

    std::uintmax_t max_iter = 200;
    const auto tol = [&](double a, double b) {
      return std::abs(b - a) <= std::max(options.terminal_tol,
                                         4 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(a), std::abs(b)));
    };
    const auto [a, b] =
        boost::math::tools::toms748_solve(miss, grid[i], grid[i + 1], fa, fb, tol, max_iter);
    result.roots.push_back(std::abs(miss(a)) <= std::abs(miss(b)) ? a : b);
  }

  if (!result.roots.empty()) {
    result.found = true;
    result.x_tf = result.roots.front();
    result.curve = integrate_characteristics_backward(sys, result.x_tf, t_f, dt_int);
  }
  return result;
}

UniquenessReport verify_uniqueness(const ScalarSystem& sys, double x0, double t_f,
                                   const std::vector<double>& terminal_grid, double dt_int) {
  UniquenessReport report;
  report.rows.reserve(terminal_grid.size());
  for (double x_tf : terminal_grid) {
    const CharacteristicCurve c = integrate_characteristics_backward(sys, x_tf, t_f, dt_int);
    if (c.ok) {
      report.rows.push_back({x_tf, c.initial_state(), c.initial_costate(), true});
    } else {
      report.rows.push_back({x_tf, kNaN, kNaN, false});
    }
  }

  int direction = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const UniquenessRow& row = report.rows[i];
    if (!row.ok) {
      report.monotone = false;
      if (report.violation.empty()) {
        report.violation = "backward characteristic from x_tf = " + std::to_string(row.x_tf) +
                           " blew up before t = 0";
      }
      continue;
    }
    if (i == 0 || !report.rows[i - 1].ok) continue;
    const UniquenessRow& prev = report.rows[i - 1];
    const double dx = row.x0 - prev.x0;
    const int sign = (dx > 0.0) - (dx < 0.0);
    if (sign == 0 || (direction != 0 && sign != direction)) {
      report.monotone = false;
      if (report.violation.empty()) {
        report.violation = "x(0) is not strictly monotone between x_tf = " +
                           std::to_string(prev.x_tf) + " and " + std::to_string(row.x_tf);
      }
    }
    if (direction == 0) direction = sign;
    if ((prev.x0 - x0 > 0.0) != (row.x0 - x0 > 0.0)) ++report.brackets;
  }
  return report;
}

double stationarity_residual(const ScalarSystem& sys, const CharacteristicCurve& curve) {
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.time.size(); ++i) {
    worst = std::max(worst, dual_residual(sys, curve.state[i], curve.costate[i], curve.control[i]));
  }
  return worst;
}

}  // namespace octrl::characteristics
