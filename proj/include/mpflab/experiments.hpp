// Copyright 2026 The mpflab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpflab/bch.hpp"
#include "mpflab/commutator_metrics.hpp"
#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/mpf.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/parallel.hpp"
#include "mpflab/product_formula.hpp"

namespace mpflab {

/// exp(-iHt) from the Hermitian eigendecomposition of the summed matrix.
inline DenseOperator exact_evolution(const HamiltonianSum& h, double t) {
  return exp_hermitian(DenseOperator(h.dense(), Structure::hermitian), t);
}

/// One-step integrator under study.
struct Evolver {
  enum class Kind { u1, u2, u2p, mpf };
  Kind kind = Kind::u2;
  int p = 1;  // u2p: order 2p
  MpfScheme scheme;

  static Evolver u1() { return {Kind::u1, 1, {}}; }
  static Evolver u2() { return {Kind::u2, 1, {}}; }
  static Evolver u2p(int p) {
    require(p >= 1, ErrorKind::InvalidArgument, "u2p needs p >= 1");
    return {Kind::u2p, p, {}};
  }
  static Evolver mpf(MpfScheme scheme) { return {Kind::mpf, 1, std::move(scheme)}; }

  std::string name() const {
    switch (kind) {
      case Kind::u1: return "u1";
      case Kind::u2: return "u2";
      case Kind::u2p: return "u" + std::to_string(2 * p);
      case Kind::mpf: return "mpf" + std::to_string(scheme.m);
    }
    return "";
  }

  DenseOperator step(const HamiltonianSum& h, double dt, int threads = 1) const {
    switch (kind) {
      case Kind::u1: return trotter_u1(h, dt);
      case Kind::u2: return trotter_u2(h, dt);
      case Kind::u2p: return suzuki_u2p(h, dt, p);
      case Kind::mpf: return mpf_operator(h, dt, scheme, threads);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown evolver");
  }
};

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
};

/// Least squares of log(y) against log(x).
inline LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::SizeMismatch, "fit sizes differ");
  LinearFit fit;
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vx = n * sxx - sx * sx;
  if (vx <= 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double vy = n * syy - sy * sy;
  fit.r_squared = vy > 0.0 ? (n * sxy - sx * sy) * (n * sxy - sx * sy) / (vx * vy) : 1.0;
  return fit;
}

struct ConvergenceStudy {
  std::string evolver;
  std::vector<double> dt_grid;
  std::vector<double> errors;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  /// Points above the noise cutoff that entered the fit.
  int points_used = 0;
  /// Every error is at rounding level: the evolver is exact for this H.
  bool exact = false;
};

/// Errors ||evolver(dt) - exp(-iH dt)|| over the grid and the log-log slope of
/// the points with error above 10 times the noise floor.
inline ConvergenceStudy convergence_study(const HamiltonianSum& h, const Evolver& ev,
                                          const std::vector<double>& dt_grid,
                                          int threads = 1) {
  require(dt_grid.size() >= 4, ErrorKind::DegenerateGrid, "grid needs >= 4 points");
  for (std::size_t i = 0; i < dt_grid.size(); ++i) {
    require(dt_grid[i] > 0.0 && std::isfinite(dt_grid[i]), ErrorKind::DegenerateGrid,
            "grid values must be positive");
    require(i == 0 || dt_grid[i] < dt_grid[i - 1], ErrorKind::DegenerateGrid,
            "grid must be strictly decreasing");
  }
  ConvergenceStudy s;
  s.evolver = ev.name();
  s.dt_grid = dt_grid;
  s.errors = parallel_map(
      dt_grid.size(),
      [&](std::size_t i) {
        return spectral_norm(ev.step(h, dt_grid[i]).matrix() -
                             exact_evolution(h, dt_grid[i]).matrix());
      },
      threads);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < dt_grid.size(); ++i) {
    if (s.errors[i] > 10.0 * defaults::kNoiseFloor) {
      xs.push_back(dt_grid[i]);
      ys.push_back(s.errors[i]);
    }
  }
  s.points_used = static_cast<int>(xs.size());
  s.exact = std::all_of(s.errors.begin(), s.errors.end(),
                        [](double e) { return e <= 1e-10; });
  if (s.exact) return s;
  require(xs.size() >= 2, ErrorKind::DegenerateGrid,
          "fewer than two errors above the noise floor");
  const auto fit = loglog_fit(xs, ys);
  s.fitted_slope = fit.slope;
  s.r_squared = fit.r_squared;
  return s;
}

/// Geometric grid of `points` values with ratio `ratio`; the top value starts
/// at `top` and halves until the evolver error there is below
/// defaults::kGridTopError.
inline std::vector<double> default_grid(const HamiltonianSum& h, const Evolver& ev,
                                        double top = 0.2,
                                        int points = defaults::kGridPoints,
                                        double ratio = defaults::kGridRatio) {
  require(top > 0 && ratio > 1 && points >= 4, ErrorKind::DegenerateGrid,
          "bad grid parameters");
  for (int shrink = 0; shrink < 40; ++shrink) {
    const double err =
        spectral_norm(ev.step(h, top).matrix() - exact_evolution(h, top).matrix());
    if (err < defaults::kGridTopError) break;
    top /= 2.0;
  }
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(top / std::pow(ratio, i));
  return grid;
}

/// Truncated short-time bound next to the measured one-step MPF error.
struct BoundCheck {
  ErrorBudget budget;
  double delta = 0.0;
  double measured = 0.0;
  double premise_radius = 0.0;
  /// measured <= thm_bound (plus the noise floor).
  bool dominated = false;
};

/// Requires a second-order based scheme, alpha to depth j_cap + 1, and delta
/// inside the heuristic convergence radius of the table.
inline BoundCheck error_bound_evaluate(const HamiltonianSum& h, double delta,
                                       const MpfScheme& scheme,
                                       const CommutatorTable& table, int j_cap,
                                       int threads = 1) {
  require(scheme.base_order == 2, ErrorKind::InvalidArgument,
          "the short-time bound is stated for second-order based schemes");
  require(table.has(j_cap + 1), ErrorKind::MissingAlpha,
          "need alpha up to depth " + std::to_string(j_cap + 1));
  BoundCheck c;
  c.delta = delta;
  c.premise_radius = convergence_radius(table);
  require(delta <= c.premise_radius, ErrorKind::PremiseViolated,
          "Delta above the estimated convergence radius");
  c.budget = error_budget(table, delta, scheme.m, scheme.a_norm, j_cap);
  c.measured = spectral_norm(mpf_operator(h, delta, scheme, threads).matrix() -
                             exact_evolution(h, delta).matrix());
  c.dominated = c.measured <= c.budget.thm_bound + defaults::kNoiseFloor;
  return c;
}

struct BenchmarkCell {
  int n = 0;
  int m = 0;
  std::int64_t r = 0;
  double queries = 0.0;
  double queries_amplified = 0.0;
  double error = 0.0;
  /// Errors at the evaluated step counts were non-increasing in r.
  bool monotone = true;
  int evaluations = 0;
};

struct ScalingResult {
  int m = 0;
  std::vector<int> n_values;
  std::vector<double> query_counts;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  double theory_exponent = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchmarkCell> cells;
  std::vector<ScalingResult> scaling;
};

struct BenchmarkOptions {
  double eps = 1e-3;
  PowerStrategy strategy = PowerStrategy::natural;
  /// Start the bracket at ceil(mu_m T) from the commutator table.
  bool mu_start = true;
  std::int64_t max_steps = defaults::kMaxSteps;
  bool periodic = true;
  int threads = 1;
};

namespace detail {

/// Smallest r with err(r) <= eps: exponential bracket from `start`, then
/// bisection. Every evaluation is recorded for the monotonicity check.
template <class ErrFn>
BenchmarkCell minimal_steps(ErrFn&& err, std::int64_t start, double eps,
                            std::int64_t cap) {
  std::map<std::int64_t, double> seen;
  auto eval = [&](std::int64_t r) {
    auto it = seen.find(r);
    if (it != seen.end()) return it->second;
    const double e = err(r);
    seen.emplace(r, e);
    return e;
  };
  std::int64_t lo = 0;  // largest known failing r (0 = none)
  std::int64_t hi = 0;  // smallest known passing r
  std::int64_t r = std::clamp<std::int64_t>(start, 1, cap);
  if (eval(r) <= eps) {
    hi = r;
    while (hi > 1) {
      const std::int64_t down = hi / 2;
      if (eval(down) <= eps) {
        hi = down;
      } else {
        lo = down;
        break;
      }
    }
  } else {
    lo = r;
    while (true) {
      require(lo < cap, ErrorKind::Infeasible,
              "step count above the cap of " + std::to_string(cap));
      const std::int64_t up = std::min(cap, lo * 2);
      if (eval(up) <= eps) {
        hi = up;
        break;
      }
      lo = up;
    }
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (eval(mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  BenchmarkCell cell;
  cell.r = hi;
  cell.error = eval(hi);
  cell.evaluations = static_cast<int>(seen.size());
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [steps, e] : seen) {
    if (e > prev * (1 + 1e-9) + defaults::kNoiseFloor) cell.monotone = false;
    prev = e;
  }
  return cell;
}

}  // namespace detail

/// Minimal MPF step count for the Heisenberg chain with T = n, for every
/// (n, m); query counts and log-log exponents against n.
inline BenchmarkResult heisenberg_benchmark(const std::vector<int>& n_list,
                                            const std::vector<int>& m_list,
                                            const BenchmarkOptions& opt = {}) {
  require(!n_list.empty() && !m_list.empty(), ErrorKind::InvalidArgument,
          "need at least one n and one m");
  require(opt.eps > 0 && opt.eps < 1, ErrorKind::InvalidArgument, "eps in (0, 1)");
  for (int n : n_list) {
    require(n >= 2 && n <= 10, ErrorKind::InvalidArgument,
            "benchmark sizes must satisfy 2 <= n <= 10");
  }
  for (int m : m_list) require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");

  std::vector<std::pair<int, int>> grid;
  for (int n : n_list) {
    for (int m : m_list) grid.emplace_back(n, m);
  }
  auto cells = parallel_map(
      grid.size(),
      [&](std::size_t idx) {
        const auto [n, m] = grid[idx];
        const auto h = heisenberg_1d(n, opt.periodic);
        const double total_time = n;
        const auto scheme =
            solve_order_condition(power_schedule(m, opt.strategy, 2), m, 2);
        const Matrix exact = exact_evolution(h, total_time).matrix();
        std::int64_t start = 1;
        if (opt.mu_start) {
          const int j_cap = 2 * m + defaults::kDefaultJCapSlack;
          const auto table = commutator_table(h, j_cap + 1);
          const double mu = mu_m(table, m, j_cap).mu_m;
          start = static_cast<std::int64_t>(std::ceil(mu * total_time));
        }
        auto err = [&](std::int64_t r) {
          return spectral_norm(mpf_evolve(h, total_time, r, scheme).matrix() - exact);
        };
        BenchmarkCell cell = detail::minimal_steps(err, start, opt.eps, opt.max_steps);
        cell.n = n;
        cell.m = m;
        cell.queries = query_count(cell.r, scheme, false);
        cell.queries_amplified = query_count(cell.r, scheme, true);
        return cell;
      },
      opt.threads);

  BenchmarkResult out;
  out.cells = std::move(cells);
  for (int m : m_list) {
    ScalingResult s;
    s.m = m;
    s.theory_exponent = heisenberg_theory_exponent(m);
    std::vector<double> ns;
    for (const auto& c : out.cells) {
      if (c.m != m) continue;
      s.n_values.push_back(c.n);
      s.query_counts.push_back(c.queries);
      ns.push_back(c.n);
    }
    if (s.n_values.size() >= 2) s.fitted_exponent = loglog_fit(ns, s.query_counts).slope;
    out.scaling.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string format_fixed3(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

/// Benchmark CSV: one row per (n, m), then a blank line and the per-m
/// exponent summary. `theory_ms` adds theory-only rows for m values without
/// measurements; the summary always ends with the m -> infinity limit row.
inline std::string benchmark_csv(const BenchmarkResult& r,
                                 const std::vector<int>& theory_ms = {}) {
  std::string out = "n,m,r,queries,queries_amplified,error\n";
  for (const auto& c : r.cells) {
    out += std::to_string(c.n) + "," + std::to_string(c.m) + "," +
           std::to_string(c.r) + "," + detail::format_number(c.queries) + "," +
           detail::format_number(c.queries_amplified) + "," +
           detail::format_number(c.error) + "\n";
  }
  if (r.scaling.empty() && theory_ms.empty()) return out;
  out += "\nm,fitted_exponent,theory_exponent\n";
  std::map<int, std::string> rows;
  for (int m : theory_ms) {
    rows[m] = std::to_string(m) + ",nan," +
              detail::format_fixed3(heisenberg_theory_exponent(m)) + "\n";
  }
  for (const auto& s : r.scaling) {
    rows[s.m] = std::to_string(s.m) + "," + detail::format_fixed3(s.fitted_exponent) +
                "," + detail::format_fixed3(s.theory_exponent) + "\n";
  }
  for (const auto& [m, row] : rows) out += row;
  out += "inf,nan," + detail::format_fixed3(4.0 / 3.0) + "\n";
  return out;
}

inline std::string convergence_csv(const std::vector<ConvergenceStudy>& studies) {
  std::string out = "evolver,dt,error,fitted_slope,r_squared,exact\n";
  for (const auto& s : studies) {
    for (std::size_t i = 0; i < s.dt_grid.size(); ++i) {
      out += s.evolver + "," + detail::format_number(s.dt_grid[i]) + "," +
             detail::format_number(s.errors[i]) + "," +
             detail::format_number(s.fitted_slope) + "," +
             detail::format_number(s.r_squared) + "," + (s.exact ? "1" : "0") + "\n";
    }
  }
  return out;
}

}  // namespace mpflab
