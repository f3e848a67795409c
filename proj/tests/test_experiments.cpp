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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mpflab/experiments.hpp"
#include "test_util.hpp"

namespace mpflab {
namespace {

HamiltonianSum commuting_model() {
  return from_pauli_specs(2, {{1.0, {{0, 'Z'}}, {}}, {0.5, {{1, 'Z'}}, {}},
                              {0.25, {{0, 'Z'}, {1, 'Z'}}, {}}});
}

MpfScheme natural_scheme(int m) {
  return solve_order_condition(power_schedule(m, PowerStrategy::natural), m, 2);
}

TEST(ExactEvolution, Basics) {
  const auto h = heisenberg_1d(3, true);
  EXPECT_LE(distance_from_identity(exact_evolution(h, 0.0).matrix()), 1e-14);
  const auto z = from_pauli_specs(1, {{1.0, {{0, 'Z'}}, {}}});
  const Matrix u = exact_evolution(z, std::acos(-1.0) / 2).matrix();
  EXPECT_NEAR(std::abs(u(0, 0) - Complex(0, -1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(u(1, 1) - Complex(0, 1)), 0.0, 1e-14);
  const Matrix a = exact_evolution(h, 0.3).matrix() * exact_evolution(h, 0.4).matrix();
  EXPECT_LE(spectral_norm(a - exact_evolution(h, 0.7).matrix()), 1e-9);
  const Matrix v = exact_evolution(h, 1.3).matrix();
  EXPECT_LE(distance_from_identity(v.adjoint() * v), 1e-10);
}

TEST(LoglogFit, ExactPowerLaw) {
  const std::vector<double> x = {1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  const auto f = loglog_fit(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(ConvergenceStudy, SecondOrderAndMpfSlopes) {
  const auto h = heisenberg_1d(3, true);
  const std::vector<double> grid = {0.1, 0.05, 0.025, 0.0125};
  const auto u2 = convergence_study(h, Evolver::u2(), grid);
  EXPECT_NEAR(u2.fitted_slope, 3.0, 0.2);
  EXPECT_EQ(u2.points_used, 4);
  const auto mpf2 = convergence_study(h, Evolver::mpf(natural_scheme(2)), grid);
  EXPECT_NEAR(mpf2.fitted_slope, 5.0, 0.3);
  const auto u1 = convergence_study(h, Evolver::u1(), grid);
  EXPECT_NEAR(u1.fitted_slope, 2.0, 0.3);
}

TEST(ConvergenceStudy, CommutingIsExact) {
  const auto s = convergence_study(commuting_model(), Evolver::u2(), {0.4, 0.2, 0.1, 0.05});
  EXPECT_TRUE(s.exact);
  for (double e : s.errors) EXPECT_LE(e, 1e-10);
}

TEST(ConvergenceStudy, DegenerateGrid) {
  const auto h = heisenberg_1d(3, true);
  auto expect_degenerate = [&](const std::vector<double>& g) {
    try {
      convergence_study(h, Evolver::u2(), g);
      FAIL() << "expected DegenerateGrid";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DegenerateGrid);
    }
  };
  expect_degenerate({0.1, 0.05, 0.025});
  expect_degenerate({0.1, 0.1, 0.05, 0.025});
  expect_degenerate({0.1, 0.05, -0.025, 0.01});
}

TEST(ConvergenceStudy, DefaultGridShrinksTop) {
  const auto h = heisenberg_1d(4, true);
  const auto grid = default_grid(h, Evolver::u1(), 2.0);
  ASSERT_EQ(grid.size(), 6u);
  const double top_err = spectral_norm(trotter_u1(h, grid[0]).matrix() -
                                       exact_evolution(h, grid[0]).matrix());
  EXPECT_LT(top_err, defaults::kGridTopError);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_DOUBLE_EQ(grid[i - 1] / grid[i], 2.0);
}

TEST(ErrorBound, CommutingModel) {
  const auto h = commuting_model();
  const auto t = commutator_table(h, 11);
  const auto c = error_bound_evaluate(h, 0.1, natural_scheme(2), t, 10);
  EXPECT_LE(c.measured, 1e-10);
  EXPECT_EQ(c.budget.thm_bound, 0.0);
  EXPECT_TRUE(c.dominated);
}

TEST(ErrorBound, DominanceOnHeisenberg) {
  const auto h = heisenberg_1d(3, true);
  const auto t = commutator_table(h, 31);
  for (int m = 1; m <= 2; ++m) {
    for (double delta : {0.05, 0.025}) {
      const auto c = error_bound_evaluate(h, delta, natural_scheme(m), t, 30);
      EXPECT_FALSE(c.budget.tail_flag) << m << " " << delta;
      EXPECT_TRUE(c.dominated) << m << " " << delta;
      EXPECT_GT(c.measured, 0.0);
    }
    const double b1 = error_bound_evaluate(h, 0.02, natural_scheme(m), t, 30).budget.thm_bound;
    const double b2 = error_bound_evaluate(h, 0.01, natural_scheme(m), t, 30).budget.thm_bound;
    EXPECT_GE(b1 / b2, std::pow(2.0, 2 * m + 1 - 0.2));
  }
}

TEST(ErrorBound, Errors) {
  const auto h = heisenberg_1d(3, true);
  const auto t = commutator_table(h, 31);
  try {
    error_bound_evaluate(h, 0.1, natural_scheme(1), t, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PremiseViolated);
  }
  try {
    error_bound_evaluate(h, 0.01, natural_scheme(1), t, 31);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingAlpha);
  }
}

TEST(MinimalSteps, MatchesLinearScan) {
  for (double c : {0.5, 3.0, 40.0, 777.0}) {
    auto err = [&](std::int64_t r) { return c / (static_cast<double>(r) * r); };
    std::int64_t expected = 1;
    while (err(expected) > 1e-3) ++expected;
    for (std::int64_t start : {1, 7, 100, 5000}) {
      const auto cell = detail::minimal_steps(err, start, 1e-3, 1'000'000);
      EXPECT_EQ(cell.r, expected) << c << " " << start;
      EXPECT_TRUE(cell.monotone);
    }
  }
}

TEST(MinimalSteps, CapAndMonotonicityFlag) {
  auto never = [](std::int64_t) { return 1.0; };
  try {
    detail::minimal_steps(never, 1, 1e-3, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
  // The error at r = 8 is larger than at r = 4: flagged, result still valid.
  auto bumpy = [](std::int64_t r) { return r <= 2 ? 1.0 : (r == 8 ? 1e-4 : 1e-5); };
  const auto cell = detail::minimal_steps(bumpy, 8, 1e-3, 1000);
  EXPECT_EQ(cell.r, 3);
  EXPECT_FALSE(cell.monotone);
}

TEST(Benchmark, SmallRunAndEnvelope) {
  BenchmarkOptions opt;
  opt.eps = 1e-2;
  const auto r = heisenberg_benchmark({3, 4}, {1, 2}, opt);
  ASSERT_EQ(r.cells.size(), 4u);
  EXPECT_EQ(r.cells[0].n, 3);
  EXPECT_EQ(r.cells[0].m, 1);
  EXPECT_EQ(r.cells[3].n, 4);
  EXPECT_EQ(r.cells[3].m, 2);
  for (const auto& c : r.cells) {
    EXPECT_LE(c.error, opt.eps);
    EXPECT_TRUE(c.monotone);
    const auto h = heisenberg_1d(c.n, true);
    const auto scheme = natural_scheme(c.m);
    EXPECT_DOUBLE_EQ(c.queries, static_cast<double>(c.r) * scheme.k_norm);
    EXPECT_DOUBLE_EQ(c.queries_amplified, c.queries * std::ceil(scheme.a_norm - 1e-9));
    // One fewer step misses the target.
    if (c.r > 1) {
      const double worse = spectral_norm(mpf_evolve(h, c.n, c.r - 1, scheme).matrix() -
                                         exact_evolution(h, c.n).matrix());
      EXPECT_GT(worse, opt.eps);
    }
    // Triangle-inequality envelope from the one-step error.
    const double dt = static_cast<double>(c.n) / static_cast<double>(c.r);
    const double one = spectral_norm(mpf_operator(h, dt, scheme).matrix() -
                                     exact_evolution(h, dt).matrix());
    const double envelope = static_cast<double>(c.r) * one *
                            std::pow(1.0 + one, static_cast<double>(c.r - 1));
    EXPECT_LE(c.error, envelope * (1 + 1e-9));
  }
  ASSERT_EQ(r.scaling.size(), 2u);
  EXPECT_TRUE(std::isfinite(r.scaling[0].fitted_exponent));
  EXPECT_DOUBLE_EQ(r.scaling[0].theory_exponent, 2.0);
  EXPECT_THROW(heisenberg_benchmark({}, {1}, opt), Error);
  EXPECT_THROW(heisenberg_benchmark({12}, {1}, opt), Error);
}

TEST(Benchmark, ThreadCountDoesNotChangeResults) {
  BenchmarkOptions opt;
  opt.eps = 1e-2;
  const auto a = heisenberg_benchmark({3, 4}, {1}, opt);
  opt.threads = 3;
  const auto b = heisenberg_benchmark({3, 4}, {1}, opt);
  EXPECT_EQ(benchmark_csv(a), benchmark_csv(b));
}

TEST(BenchmarkCsv, GoldenLayout) {
  EXPECT_EQ(benchmark_csv({}), "n,m,r,queries,queries_amplified,error\n");
  BenchmarkResult r;
  r.cells.push_back({4, 2, 38, 114, 228, 0.000974064751, true, 7});
  ScalingResult s;
  s.m = 2;
  s.n_values = {4};
  s.query_counts = {114};
  s.fitted_exponent = 1.4291;
  s.theory_exponent = heisenberg_theory_exponent(2);
  r.scaling.push_back(s);
  const std::string expected =
      "n,m,r,queries,queries_amplified,error\n"
      "4,2,38,114,228,0.000974064751\n"
      "\n"
      "m,fitted_exponent,theory_exponent\n"
      "1,nan,2.000\n"
      "2,1.429,1.667\n"
      "3,nan,1.556\n"
      "4,nan,1.500\n"
      "5,nan,1.467\n"
      "inf,nan,1.333\n";
  EXPECT_EQ(benchmark_csv(r, {1, 2, 3, 4, 5}), expected);
}

}  // namespace
}  // namespace mpflab
