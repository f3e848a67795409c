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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/parallel.hpp"
#include "mpflab/pauli.hpp"

namespace mpflab {

enum class AlphaMode { exact, capped, analytic };

constexpr std::string_view to_string(AlphaMode m) {
  switch (m) {
    case AlphaMode::exact: return "exact";
    case AlphaMode::capped: return "capped";
    case AlphaMode::analytic: return "analytic";
  }
  return "exact";
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// One alpha_comm,j value. Stored as a natural log so deep tables of large
/// Hamiltonians stay finite; log_value = -inf encodes an exact zero.
struct AlphaValue {
  double log_value = kNegInf;
  AlphaMode mode = AlphaMode::exact;

  double value() const { return std::exp(log_value); }
};

/// alpha_comm,j for j = 1..j_cap.
class CommutatorTable {
 public:
  CommutatorTable() = default;
  CommutatorTable(std::size_t gamma, std::vector<AlphaValue> values)
      : gamma_(gamma), values_(std::move(values)) {}

  /// Table from plain values, marked with a single mode.
  static CommutatorTable from_values(std::size_t gamma,
                                     const std::vector<double>& alpha,
                                     AlphaMode mode) {
    std::vector<AlphaValue> v;
    for (double a : alpha) {
      require(a >= 0.0, ErrorKind::InvalidArgument, "alpha must be >= 0");
      v.push_back({a > 0.0 ? std::log(a) : kNegInf, mode});
    }
    return CommutatorTable(gamma, std::move(v));
  }

  std::size_t gamma() const { return gamma_; }
  int j_cap() const { return static_cast<int>(values_.size()); }
  bool has(int j) const { return j >= 1 && j <= j_cap(); }

  const AlphaValue& entry(int j) const {
    require(has(j), ErrorKind::MissingAlpha,
            "alpha_comm," + std::to_string(j) + " not in table (j_cap " +
                std::to_string(j_cap()) + ")");
    return values_[static_cast<std::size_t>(j - 1)];
  }
  double alpha(int j) const { return entry(j).value(); }
  double log_alpha(int j) const { return entry(j).log_value; }

  /// exact if every entry is exact; capped if any entry is capped.
  AlphaMode mode() const {
    AlphaMode m = AlphaMode::exact;
    for (const auto& v : values_) {
      if (v.mode == AlphaMode::capped) return AlphaMode::capped;
      if (v.mode == AlphaMode::analytic) m = AlphaMode::analytic;
    }
    return m;
  }

  const std::vector<AlphaValue>& values() const { return values_; }

 private:
  std::size_t gamma_ = 0;
  std::vector<AlphaValue> values_;
};

namespace detail {

/// Level-by-level weights over Pauli strings. A tuple's nested commutator is
/// zero or a single string; extending it by H_g multiplies its norm by
/// 2|c_g| when the strings anticommute.
class PauliAlphaWalker {
 public:
  explicit PauliAlphaWalker(const HamiltonianSum& h) {
    for (const auto& t : h.terms()) {
      strings_.push_back(t.pauli().pauli);
      weights_.push_back(std::abs(t.pauli().coefficient));
    }
    for (std::size_t g = 0; g < strings_.size(); ++g) {
      if (weights_[g] > 0.0) level_[strings_[g]] += weights_[g];
    }
    normalize();
  }

  /// log alpha at the current depth.
  double log_alpha() const {
    if (level_.empty()) return kNegInf;
    return log_scale_ + std::log(total_);
  }

  /// Work for the next step (states times terms).
  double next_work() const {
    return static_cast<double>(level_.size()) * static_cast<double>(strings_.size());
  }

  void step() {
    std::map<PauliString, double> next;
    for (const auto& [s, w] : level_) {
      for (std::size_t g = 0; g < strings_.size(); ++g) {
        if (weights_[g] == 0.0 || strings_[g].commutes_with(s)) continue;
        const PauliString prod(s.n_qubits(), s.x() ^ strings_[g].x(),
                               s.z() ^ strings_[g].z());
        next[prod] += 2.0 * weights_[g] * w;
      }
    }
    level_ = std::move(next);
    normalize();
  }

 private:
  void normalize() {
    total_ = 0.0;
    double peak = 0.0;
    for (const auto& [s, w] : level_) peak = std::max(peak, w);
    if (peak == 0.0) {
      level_.clear();
      return;
    }
    for (auto& [s, w] : level_) {
      w /= peak;
      total_ += w;
    }
    log_scale_ += std::log(peak);
  }

  std::vector<PauliString> strings_;
  std::vector<double> weights_;
  std::map<PauliString, double> level_;
  double log_scale_ = 0.0;
  double total_ = 0.0;
};

/// Sum over all Gamma^j tuples of the spectral norm of the dense nested
/// commutator. Subtrees below a zero commutator are skipped.
inline double dense_alpha(const std::vector<Matrix>& terms, int j, int threads) {
  const std::size_t gamma = terms.size();
  std::function<double(const Matrix&, int)> extend = [&](const Matrix& inner,
                                                         int depth) -> double {
    if (depth == j) return spectral_norm(inner);
    double acc = 0.0;
    for (std::size_t g = 0; g < gamma; ++g) {
      Matrix c = terms[g] * inner;
      c.noalias() -= inner * terms[g];
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      acc += extend(c, depth + 1);
    }
    return acc;
  };
  auto parts = parallel_map(
      gamma, [&](std::size_t g) { return extend(terms[g], 1); }, threads);
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

inline double log_fallback(const HamiltonianSum& h, int j) {
  const double one = one_norm(h);
  if (one == 0.0) return kNegInf;
  const double base = h.has_grouping() ? induced_one_norm(h) : one;
  if (base == 0.0) return j == 1 ? std::log(one) : kNegInf;
  return (j - 1) * std::log(2.0 * base) + std::log(one);
}

}  // namespace detail

struct AlphaOptions {
  std::uint64_t budget = defaults::kAlphaBudget;
  /// Use the Pauli-group path when every term is a Pauli string.
  bool use_pauli = true;
  /// Replace entries over budget by the fallback bound instead of throwing.
  bool allow_capped = true;
  int threads = 1;
};

/// alpha_comm,j for j = 1..j_cap.
///
/// Pauli Hamiltonians use the string walk (cost grows with the number of
/// distinct strings reached, not Gamma^j). Other Hamiltonians enumerate
/// Gamma^j dense tuples. Entries over budget fall back to
/// 2^{j-1} |||H|||_1^{j-1} ||H||_1 (or ||H||_1^j without grouping labels),
/// flagged capped.
inline CommutatorTable commutator_table(const HamiltonianSum& h, int j_cap,
                                        const AlphaOptions& opt = {}) {
  require(j_cap >= 1, ErrorKind::InvalidArgument, "j_cap must be >= 1");
  std::vector<AlphaValue> values;
  auto over_budget = [&](int j) {
    require(opt.allow_capped, ErrorKind::BudgetExceeded,
            "alpha_comm," + std::to_string(j) + " exceeds the enumeration budget");
    values.push_back({detail::log_fallback(h, j), AlphaMode::capped});
  };

  if (opt.use_pauli && h.is_pauli()) {
    detail::PauliAlphaWalker walker(h);
    double work = 0.0;
    bool capped = false;
    for (int j = 1; j <= j_cap; ++j) {
      if (capped) {
        over_budget(j);
        continue;
      }
      values.push_back({walker.log_alpha(), AlphaMode::exact});
      if (j == j_cap) break;
      work += walker.next_work();
      if (work > static_cast<double>(opt.budget)) {
        capped = true;
        continue;
      }
      walker.step();
    }
    return CommutatorTable(h.size(), std::move(values));
  }

  std::vector<Matrix> terms;
  for (const auto& t : h.terms()) terms.push_back(t.dense());
  for (int j = 1; j <= j_cap; ++j) {
    const double tuples = std::pow(static_cast<double>(h.size()), j);
    if (tuples > static_cast<double>(opt.budget)) {
      over_budget(j);
      continue;
    }
    const double a = j == 1 ? one_norm(h) : detail::dense_alpha(terms, j, opt.threads);
    values.push_back({a > 0.0 ? std::log(a) : kNegInf, AlphaMode::exact});
  }
  return CommutatorTable(h.size(), std::move(values));
}

/// Single alpha_comm,j.
inline AlphaValue alpha_comm(const HamiltonianSum& h, int j,
                             const AlphaOptions& opt = {}) {
  return commutator_table(h, j, opt).entry(j);
}

/// Dense enumeration, kept as an independent check of the Pauli path.
inline double alpha_comm_dense(const HamiltonianSum& h, int j, int threads = 1) {
  require(j >= 1, ErrorKind::InvalidArgument, "j must be >= 1");
  std::vector<Matrix> terms;
  for (const auto& t : h.terms()) terms.push_back(t.dense());
  return detail::dense_alpha(terms, j, threads);
}

/// Which composition parts are allowed for each base formula.
struct Variant {
  enum class Kind { second_order, first_order, order_2p };
  Kind kind = Kind::second_order;
  int p = 1;  // order 2p when kind == order_2p

  static Variant second_order() { return {Kind::second_order, 1}; }
  static Variant first_order() { return {Kind::first_order, 1}; }
  static Variant order_2p(int p) {
    require(p >= 1, ErrorKind::InvalidArgument, "order_2p needs p >= 1");
    return {Kind::order_2p, p};
  }
  static Variant for_base_order(int base_order) {
    if (base_order == 1) return first_order();
    if (base_order == 2) return second_order();
    require(base_order % 2 == 0, ErrorKind::InvalidArgument, "odd base order");
    return order_2p(base_order / 2);
  }

  bool part_ok(int part) const {
    switch (kind) {
      case Kind::first_order: return part >= 1;
      case Kind::second_order: return part >= 2 && part % 2 == 0;
      case Kind::order_2p: return part >= 2 * p && part % 2 == 0;
    }
    return false;
  }

  /// Smallest j in the supremum for target m.
  int j_min(int m) const { return kind == Kind::first_order ? m : 2 * m; }
  bool j_ok(int j, int m) const {
    if (j < j_min(m)) return false;
    return kind == Kind::first_order || j % 2 == 0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::first_order: return "first_order";
      case Kind::second_order: return "second_order";
      case Kind::order_2p: return "order_" + std::to_string(2 * p);
    }
    return "";
  }

  friend bool operator==(const Variant&, const Variant&) = default;
};

/// Sums (and maxima) over compositions j = j_1 + ... + j_l with allowed parts
/// of prod alpha_{j_k + 1}. Values are kept relative to rho^{j+l} with rho the
/// largest alpha_i^{1/i}, so nothing overflows.
class CompositionSums {
 public:
  CompositionSums(const CommutatorTable& table, const Variant& variant, int j_max)
      : variant_(variant), j_max_(j_max) {
    require(j_max >= 0, ErrorKind::InvalidArgument, "j_max must be >= 0");
    require(table.has(j_max + 1), ErrorKind::MissingAlpha,
            "need alpha up to depth " + std::to_string(j_max + 1));
    log_rho_ = kNegInf;
    for (int i = 2; i <= j_max + 1; ++i) {
      const double la = table.log_alpha(i);
      if (la != kNegInf) log_rho_ = std::max(log_rho_, la / i);
    }
    scaled_.assign(static_cast<std::size_t>(j_max + 2), 0.0);
    for (int i = 2; i <= j_max + 1; ++i) {
      const double la = table.log_alpha(i);
      scaled_[static_cast<std::size_t>(i)] =
          la == kNegInf ? 0.0 : std::exp(la - i * log_rho_);
    }
    const auto n = static_cast<std::size_t>(j_max + 1);
    sum_.assign(n, std::vector<double>(n, 0.0));
    max_.assign(n, std::vector<double>(n, 0.0));
    sum_[0][0] = 1.0;
    max_[0][0] = 1.0;
    for (int j = 1; j <= j_max; ++j) {
      for (int l = 1; l <= j; ++l) {
        double s = 0.0, mx = 0.0;
        for (int part = 1; part <= j; ++part) {
          if (!variant_.part_ok(part)) continue;
          const double a = scaled_[static_cast<std::size_t>(part + 1)];
          const auto rest = static_cast<std::size_t>(j - part);
          s += a * sum_[rest][static_cast<std::size_t>(l - 1)];
          mx = std::max(mx, a * max_[rest][static_cast<std::size_t>(l - 1)]);
        }
        sum_[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = s;
        max_[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = mx;
      }
    }
  }

  int j_max() const { return j_max_; }
  double log_rho() const { return log_rho_; }

  /// sum / rho^{j+l}
  double scaled_sum(int j, int l) const { return at(sum_, j, l); }
  double scaled_max(int j, int l) const { return at(max_, j, l); }

  /// log of the composition sum, -inf when it vanishes.
  double log_sum(int j, int l) const {
    const double s = scaled_sum(j, l);
    return s > 0.0 ? std::log(s) + (j + l) * log_rho_ : kNegInf;
  }

  /// (sum)^{1/(j+l)}
  double lambda(int j, int l) const {
    const double s = scaled_sum(j, l);
    return s > 0.0 ? std::exp(log_rho_ + std::log(s) / (j + l)) : 0.0;
  }
  double max_root(int j, int l) const {
    const double s = scaled_max(j, l);
    return s > 0.0 ? std::exp(log_rho_ + std::log(s) / (j + l)) : 0.0;
  }

 private:
  double at(const std::vector<std::vector<double>>& v, int j, int l) const {
    if (j < 0 || l < 0 || j > j_max_ || l > j_max_) return 0.0;
    return v[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  }

  Variant variant_;
  int j_max_ = 0;
  double log_rho_ = 0.0;
  std::vector<double> scaled_;
  std::vector<std::vector<double>> sum_;
  std::vector<std::vector<double>> max_;
};

/// lambda_{j,l} = (sum over compositions of prod alpha_{j_k+1})^{1/(j+l)}
inline double lambda_jl(const CommutatorTable& table, int j, int l,
                        const Variant& variant = Variant::second_order()) {
  require(j >= 1 && l >= 1, ErrorKind::InvalidArgument, "need j, l >= 1");
  require(j <= defaults::kMaxCompositionDepth, ErrorKind::PartitionBlowup,
          "composition depth above " +
              std::to_string(defaults::kMaxCompositionDepth));
  return CompositionSums(table, variant, j).lambda(j, l);
}

struct MuReport {
  int m = 1;
  double mu_m = 0.0;
  int argmax_j = 0;
  int argmax_l = 0;
  /// One composition attaining the largest single product at the argmax.
  std::vector<int> argmax_partition;
  double mu_upper = 0.0;
  int j_cap = 0;
  Variant variant;
  /// The supremum was still growing in the last two j-slices.
  bool tail_flag = false;
};

namespace detail {

inline std::vector<int> best_partition(const CommutatorTable& table,
                                       const Variant& v, int j, int l) {
  // Greedy reconstruction along the max-product recursion.
  CompositionSums sums(table, v, j);
  std::vector<int> parts;
  int rest = j;
  for (int left = l; left >= 1; --left) {
    double best = -1.0;
    int arg = 0;
    for (int part = 1; part <= rest; ++part) {
      if (!v.part_ok(part)) continue;
      const double la = table.log_alpha(part + 1);
      if (la == kNegInf) continue;
      const double tail = sums.scaled_max(rest - part, left - 1);
      if (tail <= 0.0) continue;
      const double val = std::exp(la - (part + 1) * sums.log_rho()) * tail;
      if (val > best) {
        best = val;
        arg = part;
      }
    }
    if (arg == 0) return {};
    parts.push_back(arg);
    rest -= arg;
  }
  return parts;
}

}  // namespace detail

/// mu_m: supremum of lambda_{j,l} over the variant's index set, truncated at
/// j <= j_cap. Scans j upward, then l; the first strict maximum wins.
inline MuReport mu_m(const CommutatorTable& table, int m, int j_cap,
                     const Variant& variant = Variant::second_order()) {
  require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
  require(j_cap >= variant.j_min(m), ErrorKind::InvalidArgument,
          "j_cap must be at least " + std::to_string(variant.j_min(m)));
  require(j_cap <= defaults::kMaxCompositionDepth, ErrorKind::PartitionBlowup,
          "j_cap above " + std::to_string(defaults::kMaxCompositionDepth));
  CompositionSums sums(table, variant, j_cap);
  MuReport r;
  r.m = m;
  r.j_cap = j_cap;
  r.variant = variant;
  double upper = 0.0;
  std::vector<int> slices;
  std::vector<double> slice_best;
  for (int j = variant.j_min(m); j <= j_cap; ++j) {
    if (!variant.j_ok(j, m)) continue;
    double best_here = 0.0;
    for (int l = 1; l <= m; ++l) {
      const double lam = sums.lambda(j, l);
      best_here = std::max(best_here, lam);
      if (lam > r.mu_m) {
        r.mu_m = lam;
        r.argmax_j = j;
        r.argmax_l = l;
      }
      upper = std::max(upper, sums.max_root(j, l));
    }
    slices.push_back(j);
    slice_best.push_back(best_here);
  }
  r.mu_upper = 2.0 * upper;
  if (r.argmax_j > 0) {
    r.argmax_partition = detail::best_partition(table, variant, r.argmax_j, r.argmax_l);
  }
  if (slices.size() >= 2 && r.mu_m > 0.0) {
    const int last = slices[slices.size() - 1];
    const int before = slices[slices.size() - 2];
    r.tail_flag = r.argmax_j == last || r.argmax_j == before;
  }
  return r;
}

inline double mu_upper_bound(const CommutatorTable& table, int m, int j_cap,
                             const Variant& variant = Variant::second_order()) {
  return mu_m(table, m, j_cap, variant).mu_upper;
}

/// Largest Delta for which alpha_j Delta^j <= 1 is plausible for all large j:
/// min of alpha_j^{-1/j} over the upper half of the table, and of the inverse
/// last growth ratio. Heuristic; the true premise involves all j.
inline double convergence_radius(const CommutatorTable& table) {
  const int cap = table.j_cap();
  double radius = std::numeric_limits<double>::infinity();
  for (int j = std::max(1, cap / 2); j <= cap; ++j) {
    const double la = table.log_alpha(j);
    if (la == kNegInf) continue;
    radius = std::min(radius, std::exp(-la / j));
  }
  if (cap >= 2) {
    const double a = table.log_alpha(cap);
    const double b = table.log_alpha(cap - 1);
    if (a != kNegInf && b != kNegInf) radius = std::min(radius, std::exp(b - a));
  }
  return radius;
}

/// Closed-form commutator scalings with all constants set to one.
struct AnalyticMu {
  std::string expression;
  double value = 0.0;
  /// Exponent of n in the gate complexity where the model defines one.
  std::optional<double> gate_exponent;
};

inline AnalyticMu analytic_mu_electronic_structure(int n) {
  require(n >= 1, ErrorKind::BadRegime, "n must be >= 1");
  return {"n", static_cast<double>(n), 2.0};
}

/// |||H|||^{p/(p+1)} ||H||^{1/(p+1)} for a p-th order base formula.
inline AnalyticMu analytic_mu_k_local(double induced, double one, int p = 2) {
  require(induced > 0 && one > 0 && induced <= one * (1 + 1e-12),
          ErrorKind::BadRegime, "need 0 < |||H|||_1 <= ||H||_1");
  require(p >= 1, ErrorKind::BadRegime, "p must be >= 1");
  const double pp = p;
  return {"|||H|||^(" + std::to_string(p) + "/" + std::to_string(p + 1) +
              ") ||H||^(1/" + std::to_string(p + 1) + ")",
          std::pow(induced, pp / (pp + 1)) * std::pow(one, 1.0 / (pp + 1)),
          std::nullopt};
}

enum class PowerLawRegime { below, critical, above };

/// Power-law lattice: norms from the regime table, then the k-local shape with
/// k = 2.
inline AnalyticMu analytic_mu_power_law(int n, int d, double alpha,
                                        PowerLawRegime regime) {
  require(n >= 2 && d >= 1 && alpha >= 0, ErrorKind::BadRegime,
          "need n >= 2, d >= 1, alpha >= 0");
  const double ratio = alpha / d;
  const bool consistent =
      (regime == PowerLawRegime::below && ratio < 1.0) ||
      (regime == PowerLawRegime::critical && ratio == 1.0) ||
      (regime == PowerLawRegime::above && ratio > 1.0);
  require(consistent, ErrorKind::BadRegime, "alpha/d does not match the regime");
  const double nn = n;
  double induced = 1.0, one = nn, gate = 7.0 / 3.0;
  std::string expr = "n^(1/3)";
  if (regime == PowerLawRegime::below) {
    induced = std::pow(nn, 1.0 - ratio);
    one = std::pow(nn, 2.0 - ratio);
    gate = 10.0 / 3.0 - ratio;
    expr = "n^(4/3 - alpha/d)";
  } else if (regime == PowerLawRegime::critical) {
    induced = std::log(nn);
    one = nn * std::log(nn);
    expr = "n^(1/3) log(n)";
  }
  return {expr, std::pow(induced, 2.0 / 3.0) * std::pow(one, 1.0 / 3.0), gate};
}

/// Exponent of n in the query count with T = n for the m-th order scheme.
inline double heisenberg_theory_exponent(int m) {
  require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
  return 4.0 / 3.0 + 2.0 / (3.0 * m);
}

}  // namespace mpflab
