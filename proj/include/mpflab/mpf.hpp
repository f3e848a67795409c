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
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/parallel.hpp"
#include "mpflab/product_formula.hpp"

namespace mpflab {

/// Exponents e of the order-condition rows sum_j a_j k_j^{-e} = [e == 0].
/// Base 2: 0, 2, ..., 2m-2. Base 1: 0, 1, ..., m-1. Base 2p:
/// 0, 2p, 2p+2, ..., 2m-2.
inline std::vector<int> order_condition_exponents(int m, int base_order) {
  require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
  std::vector<int> rows{0};
  if (base_order == 1) {
    for (int q = 1; q < m; ++q) rows.push_back(q);
    return rows;
  }
  require(base_order >= 2 && base_order % 2 == 0, ErrorKind::InvalidArgument,
          "base order must be 1 or even, got " + std::to_string(base_order));
  for (int e = base_order; e <= 2 * m - 2; e += 2) rows.push_back(e);
  return rows;
}

struct MpfScheme {
  int base_order = 2;
  int m = 1;
  std::vector<std::int64_t> powers;
  std::vector<double> coefficients;
  double a_norm = 0.0;
  double k_norm = 0.0;

  std::size_t size() const { return powers.size(); }

  /// max over rows of |sum_j a_j k_j^{-e} - [e == 0]|
  double residual() const {
    double worst = 0.0;
    for (int e : order_condition_exponents(m, base_order)) {
      long double acc = 0.0L;
      for (std::size_t j = 0; j < powers.size(); ++j) {
        acc += static_cast<long double>(coefficients[j]) *
               std::pow(static_cast<long double>(powers[j]), -e);
      }
      if (e == 0) acc -= 1.0L;
      worst = std::max(worst, static_cast<double>(std::fabs(acc)));
    }
    return worst;
  }

  friend bool operator==(const MpfScheme&, const MpfScheme&) = default;
};

namespace detail {

inline void check_powers(const std::vector<std::int64_t>& powers) {
  require(!powers.empty(), ErrorKind::SizeMismatch, "no powers given");
  for (auto k : powers) {
    require(k >= 1, ErrorKind::NonPositive, "powers must be positive");
    require(k <= defaults::kMaxPower, ErrorKind::InvalidArgument,
            "powers are limited to 1e5");
  }
  std::set<std::int64_t> seen(powers.begin(), powers.end());
  require(seen.size() == powers.size(), ErrorKind::DuplicatePowers,
          "powers must be distinct");
}

/// Lagrange weights a_j = prod_{i != j} x_i / (x_i - x_j), the values at 0 of
/// the Lagrange basis on nodes x.
inline std::vector<double> lagrange_weights_at_zero(
    const std::vector<long double>& x) {
  std::vector<double> a(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    long double w = 1.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == j) continue;
      const long double gap = x[i] - x[j];
      require(gap != 0.0L, ErrorKind::SingularSystem, "coincident nodes");
      w *= x[i] / gap;
    }
    a[j] = static_cast<double>(w);
  }
  return a;
}

}  // namespace detail

/// Direct solve of the order-condition system with full-pivot LU.
inline std::vector<double> solve_order_condition_direct(
    const std::vector<std::int64_t>& powers, int m, int base_order) {
  const auto rows = order_condition_exponents(m, base_order);
  require(rows.size() == powers.size(), ErrorKind::SizeMismatch,
          "need " + std::to_string(rows.size()) + " powers, got " +
              std::to_string(powers.size()));
  const auto n = static_cast<Eigen::Index>(powers.size());
  Eigen::MatrixXd v(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      v(r, c) = std::pow(static_cast<double>(powers[static_cast<std::size_t>(c)]),
                         -rows[static_cast<std::size_t>(r)]);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  require(lu.isInvertible(), ErrorKind::SingularSystem,
          "order-condition matrix is singular");
  Eigen::VectorXd a = lu.solve(rhs);
  return {a.data(), a.data() + n};
}

/// Coefficients from the order condition. Bases 1 and 2 use closed-form
/// Lagrange weights in the nodes 1/k and 1/k^2; other bases fall back to a
/// direct solve.
inline MpfScheme solve_order_condition(std::vector<std::int64_t> powers, int m,
                                       int base_order) {
  detail::check_powers(powers);
  const auto rows = order_condition_exponents(m, base_order);
  require(rows.size() == powers.size(), ErrorKind::SizeMismatch,
          "need " + std::to_string(rows.size()) + " powers, got " +
              std::to_string(powers.size()));
  MpfScheme s;
  s.base_order = base_order;
  s.m = m;
  s.powers = std::move(powers);
  if (base_order <= 2) {
    std::vector<long double> x;
    for (auto k : s.powers) {
      const long double kk = static_cast<long double>(k);
      x.push_back(base_order == 1 ? 1.0L / kk : 1.0L / (kk * kk));
    }
    s.coefficients = detail::lagrange_weights_at_zero(x);
  } else {
    s.coefficients = solve_order_condition_direct(s.powers, m, base_order);
  }
  for (double a : s.coefficients) s.a_norm += std::abs(a);
  for (auto k : s.powers) s.k_norm += static_cast<double>(k);
  return s;
}

enum class PowerStrategy { natural, min_a_norm };

namespace detail {

struct Ranked {
  double a_norm;
  double k_norm;
  std::vector<std::int64_t> powers;

  bool better_than(const Ranked& o) const {
    constexpr double kTie = 1e-12;
    if (a_norm < o.a_norm - kTie * o.a_norm) return true;
    if (a_norm > o.a_norm + kTie * o.a_norm) return false;
    if (k_norm != o.k_norm) return k_norm < o.k_norm;
    return powers < o.powers;
  }
};

inline Ranked rank(const std::vector<std::int64_t>& powers, int m, int base) {
  auto s = solve_order_condition(powers, m, base);
  return {s.a_norm, s.k_norm, s.powers};
}

}  // namespace detail

/// Above this many subsets the min_a_norm search is greedy instead of
/// exhaustive.
inline constexpr double kExhaustiveSubsetLimit = 2e6;

/// Powers for an m-th order scheme. `natural` is (1, ..., M). `min_a_norm`
/// searches increasing M-subsets of [1, 8m] for the smallest ||a||_1, ties
/// broken by smaller ||k||_1 then lexicographically.
inline std::vector<std::int64_t> power_schedule(int m, PowerStrategy strategy,
                                                int base_order = 2) {
  const auto count = order_condition_exponents(m, base_order).size();
  std::vector<std::int64_t> natural(count);
  std::iota(natural.begin(), natural.end(), std::int64_t{1});
  if (strategy == PowerStrategy::natural || count == 1) return natural;

  const std::int64_t cap = 8 * static_cast<std::int64_t>(m);
  double subsets = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    subsets *= static_cast<double>(cap - static_cast<std::int64_t>(i)) /
               static_cast<double>(i + 1);
  }

  detail::Ranked best = detail::rank(natural, m, base_order);
  if (subsets <= kExhaustiveSubsetLimit) {
    std::vector<std::int64_t> cur(count);
    std::iota(cur.begin(), cur.end(), std::int64_t{1});
    while (true) {
      auto cand = detail::rank(cur, m, base_order);
      if (cand.better_than(best)) best = std::move(cand);
      // next combination in lexicographic order
      std::size_t i = count;
      while (i > 0 && cur[i - 1] == cap - static_cast<std::int64_t>(count - i)) --i;
      if (i == 0) break;
      ++cur[i - 1];
      for (std::size_t j = i; j < count; ++j) cur[j] = cur[j - 1] + 1;
    }
    return best.powers;
  }

  // Coordinate descent from the natural schedule.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t slot = 0; slot < count; ++slot) {
      for (std::int64_t v = 1; v <= cap; ++v) {
        auto trial = best.powers;
        if (std::find(trial.begin(), trial.end(), v) != trial.end()) continue;
        trial[slot] = v;
        std::sort(trial.begin(), trial.end());
        auto cand = detail::rank(trial, m, base_order);
        if (cand.better_than(best)) {
          best = std::move(cand);
          improved = true;
        }
      }
    }
  }
  return best.powers;
}

inline ProductFormulaSpec base_formula(const HamiltonianSum& h, int base_order) {
  return ProductFormulaSpec::of_order(h.size(), base_order);
}

/// sum_j a_j U_base(delta / k_j)^{k_j} as an explicit linear combination.
/// Summands may be computed concurrently; they are added in index order.
inline DenseOperator mpf_operator(const HamiltonianSum& h, double delta,
                                  const MpfScheme& scheme, int threads = 1) {
  require(std::isfinite(delta), ErrorKind::InvalidArgument, "delta not finite");
  require(scheme.coefficients.size() == scheme.powers.size(),
          ErrorKind::SizeMismatch, "scheme coefficients and powers differ");
  const ProductFormula f(h, base_formula(h, scheme.base_order));
  auto parts = parallel_map(
      scheme.size(),
      [&](std::size_t j) { return f.powered(delta, scheme.powers[j]); }, threads);
  Matrix total = Matrix::Zero(h.dim(), h.dim());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    total += scheme.coefficients[j] * parts[j];
  }
  return DenseOperator(std::move(total));
}

/// (U_MP(T / r))^r
inline DenseOperator mpf_evolve(const HamiltonianSum& h, double total_time,
                                std::int64_t r, const MpfScheme& scheme,
                                int threads = 1) {
  require(r >= 1, ErrorKind::NonPositive, "step count must be >= 1");
  const auto step = mpf_operator(h, total_time / static_cast<double>(r), scheme,
                                 threads);
  return DenseOperator(matrix_power(step.matrix(), r));
}

/// MPF applied to a state. The result is not renormalized unless asked.
inline StateVector mpf_apply(const HamiltonianSum& h, double delta,
                             const MpfScheme& scheme, const StateVector& psi,
                             bool normalize = false) {
  require(psi.dim() == h.dim(), ErrorKind::DimMismatch, "mpf_apply");
  const ProductFormula f(h, base_formula(h, scheme.base_order));
  Vector total = Vector::Zero(h.dim());
  for (std::size_t j = 0; j < scheme.size(); ++j) {
    Matrix block = psi.amplitudes;
    const double dt = delta / static_cast<double>(scheme.powers[j]);
    for (std::int64_t step = 0; step < scheme.powers[j]; ++step) f.apply_to(block, dt);
    total += scheme.coefficients[j] * block.col(0);
  }
  if (normalize) {
    total.normalize();
    return {std::move(total), true};
  }
  return {std::move(total), false};
}

/// ceil(2 mu T (2 mu T ||a||_1 / eps)^{1/(2m)})
inline std::int64_t required_steps(double mu_m, double total_time, double eps,
                                   int m, double a_norm) {
  require(mu_m > 0 && total_time > 0 && eps > 0 && a_norm > 0 && m >= 1,
          ErrorKind::NonPositive, "required_steps needs positive arguments");
  require(eps < 1.0, ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  const double x = 2.0 * mu_m * total_time;
  const double r = x * std::pow(x * a_norm / eps, 1.0 / (2.0 * m));
  // Values within rounding of an integer are not bumped to the next one.
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(nearest));
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r)));
}

/// r ||k||_1, times ceil(||a||_1) when amplitude amplification is counted.
inline double query_count(std::int64_t r, const MpfScheme& scheme,
                          bool include_amplification) {
  double q = static_cast<double>(r) * scheme.k_norm;
  if (include_amplification) q *= std::ceil(scheme.a_norm - 1e-9);
  return q;
}

}  // namespace mpflab
