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
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpflab/commutator_metrics.hpp"
#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/pauli.hpp"

namespace mpflab {

/// Permutation of {0, ..., k-1}; images[i] is sigma(i).
class Permutation {
 public:
  explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<int> sorted = images_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      require(sorted[i] == static_cast<int>(i), ErrorKind::InvalidArgument,
              "not a permutation");
    }
    require(!images_.empty(), ErrorKind::InvalidArgument, "empty permutation");
  }

  static Permutation identity(int k) {
    std::vector<int> v(static_cast<std::size_t>(k));
    std::iota(v.begin(), v.end(), 0);
    return Permutation(std::move(v));
  }

  int size() const { return static_cast<int>(images_.size()); }
  int operator[](int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }

 private:
  std::vector<int> images_;
};

/// Number of positions i with sigma(i+1) < sigma(i).
inline int descent_count(const Permutation& sigma) {
  int d = 0;
  for (int i = 0; i + 1 < sigma.size(); ++i) d += sigma[i + 1] < sigma[i];
  return d;
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// (sigma, (-1)^d / (k^2 C(k-1, d))) for every sigma in S_k, lexicographic.
inline const std::vector<std::pair<std::vector<int>, double>>& phi_weights(int k) {
  static std::map<int, std::vector<std::pair<std::vector<int>, double>>> cache;
  static std::mutex lock;
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<std::vector<int>, double>> out;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const int d = descent_count(Permutation(perm));
    const double w = (d % 2 == 0 ? 1.0 : -1.0) /
                     (binomial(k - 1, d) * static_cast<double>(k) * k);
    out.emplace_back(perm, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cache.emplace(k, std::move(out)).first->second;
}

inline Matrix nested_of(std::span<const Matrix> ops, std::span<const int> order) {
  Matrix acc = ops[static_cast<std::size_t>(order.back())];
  for (std::size_t i = order.size() - 1; i-- > 0;) {
    const Matrix& a = ops[static_cast<std::size_t>(order[i])];
    Matrix next = a * acc;
    next.noalias() -= acc * a;
    acc = std::move(next);
  }
  return acc;
}

}  // namespace detail

/// phi_k(Y_1..Y_k) = (1/k^2) sum_sigma (-1)^{d_sigma} / C(k-1, d_sigma)
///                   [Y_sigma(1), [..., Y_sigma(k)]]
inline DenseOperator phi_k(std::span<const DenseOperator> ys) {
  require(!ys.empty(), ErrorKind::EmptyList, "phi_k needs k >= 1");
  const int k = static_cast<int>(ys.size());
  require(k <= defaults::kPhiDepthCap, ErrorKind::DepthCap,
          "phi_k limited to k <= 8");
  const auto dim = ys.front().dim();
  std::vector<Matrix> mats;
  for (const auto& y : ys) {
    require(y.dim() == dim, ErrorKind::DimMismatch, "phi_k");
    mats.push_back(y.matrix());
  }
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& [perm, w] : detail::phi_weights(k)) {
    total += w * detail::nested_of(mats, perm);
  }
  return DenseOperator(std::move(total));
}

/// Degree-k part of log(e^X e^Y): sum_{i} phi_k(X^i, Y^{k-i}) / (i! (k-i)!).
inline DenseOperator bch_two_term_degree(const DenseOperator& x,
                                         const DenseOperator& y, int k) {
  Matrix total = Matrix::Zero(x.dim(), x.dim());
  double fact_k = 1.0;
  for (int i = 2; i <= k; ++i) fact_k *= i;
  for (int i = 0; i <= k; ++i) {
    std::vector<DenseOperator> word;
    for (int a = 0; a < i; ++a) word.push_back(x);
    for (int b = i; b < k; ++b) word.push_back(y);
    const double weight = detail::binomial(k, i) / fact_k;  // 1 / (i! (k-i)!)
    total += weight * phi_k(word).matrix();
  }
  return DenseOperator(std::move(total));
}

/// ||log(e^X e^Y) - sum_{k <= k_max} Z_k|| for anti-Hermitian X, Y with
/// ||X|| + ||Y|| <= 1/4.
inline double bch_two_term_check(const DenseOperator& x, const DenseOperator& y,
                                 int k_max) {
  require(x.dim() == y.dim(), ErrorKind::DimMismatch, "bch_two_term_check");
  require(k_max >= 1, ErrorKind::InvalidArgument, "k_max must be >= 1");
  require(spectral_norm(x) + spectral_norm(y) <= 0.25, ErrorKind::ConvergenceRisk,
          "need ||X|| + ||Y|| <= 1/4");
  const Matrix product =
      matrix_exponential(x).matrix() * matrix_exponential(y).matrix();
  Matrix z = matrix_log_unitary(DenseOperator(product)).matrix();
  for (int k = 1; k <= k_max; ++k) z -= bch_two_term_degree(x, y, k).matrix();
  return spectral_norm(z);
}

struct BchTermReport {
  int k = 0;
  DenseOperator phi_value;
  double norm = 0.0;
  /// alpha_comm,k(sH) / k^2
  double bound = 0.0;
  /// Even k: Phi_k vanishes identically and was not computed.
  bool structural_zero = false;
  /// |s| is inside the heuristic convergence radius.
  bool converged_premise = true;
};

namespace detail {

/// c(w) for every word w over term indices such that
/// Phi_k = (-i s / 2)^k sum_w c(w) [H_w1, [..., H_wk]].
/// Letters are the 2G entries of the palindrome H_1..H_G H_G..H_1; each
/// multiset i of letter counts contributes phi_k of its sorted word divided
/// by prod i!.
inline std::map<std::vector<int>, double> symmetric_word_coefficients(
    std::size_t gamma, int k) {
  const std::size_t letters = 2 * gamma;
  auto term_of = [&](std::size_t letter) {
    return static_cast<int>(letter < gamma ? letter : letters - 1 - letter);
  };
  double multisets = detail::binomial(static_cast<int>(letters) + k - 1, k);
  double perms = 1.0;
  for (int i = 2; i <= k; ++i) perms *= i;
  require(multisets * perms <= defaults::kSymmetricWorkBudget,
          ErrorKind::BudgetExceeded,
          "symmetric BCH enumeration too large for k=" + std::to_string(k));

  std::map<std::vector<int>, double> coeff;
  const auto& weights = phi_weights(k);
  std::vector<int> counts(letters, 0);
  std::vector<double> inv_fact(static_cast<std::size_t>(k + 1), 1.0);
  for (int i = 2; i <= k; ++i) inv_fact[static_cast<std::size_t>(i)] =
      inv_fact[static_cast<std::size_t>(i - 1)] / i;

  std::vector<int> word(static_cast<std::size_t>(k));
  std::vector<int> permuted(static_cast<std::size_t>(k));
  std::function<void(std::size_t, int)> visit = [&](std::size_t letter, int left) {
    if (letter + 1 == letters) {
      counts[letter] = left;
      double scale = 1.0;
      std::size_t pos = 0;
      for (std::size_t l = 0; l < letters; ++l) {
        scale *= inv_fact[static_cast<std::size_t>(counts[l])];
        for (int c = 0; c < counts[l]; ++c) word[pos++] = term_of(l);
      }
      for (const auto& [perm, w] : weights) {
        for (int i = 0; i < k; ++i) {
          permuted[static_cast<std::size_t>(i)] =
              word[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        }
        coeff[permuted] += scale * w;
      }
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[letter] = c;
      visit(letter + 1, left - c);
    }
  };
  visit(0, k);
  return coeff;
}

/// sum_w c(w) [H_w1, [..., H_wk]] with words evaluated in the Pauli group
/// when possible.
inline Matrix evaluate_words(const HamiltonianSum& h,
                             const std::map<std::vector<int>, double>& coeff) {
  const auto dim = h.dim();
  if (h.is_pauli()) {
    std::map<PauliString, Complex> acc;
    for (const auto& [w, c] : coeff) {
      if (c == 0.0) continue;
      const auto& inner = h.term(static_cast<std::size_t>(w.back())).pauli();
      PauliString s = inner.pauli;
      int phase = 0;
      double scale = c * inner.coefficient;
      bool zero = false;
      for (std::size_t i = w.size() - 1; i-- > 0;) {
        const auto& t = h.term(static_cast<std::size_t>(w[i])).pauli();
        PhasedPauli out;
        if (!commutator(t.pauli, s, out)) {
          zero = true;
          break;
        }
        phase += out.phase;
        s = out.string;
        scale *= 2.0 * t.coefficient;
      }
      if (zero) continue;
      acc[s] += scale * PauliString::ipow(phase);
    }
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto& [s, c] : acc) {
      if (c == Complex(0.0)) continue;
      total += c * s.dense();
    }
    return total;
  }
  std::vector<Matrix> terms;
  for (const auto& t : h.terms()) terms.push_back(t.dense());
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& [w, c] : coeff) {
    if (c == 0.0) continue;
    total += c * nested_of(terms, w);
  }
  return total;
}

inline Complex pow_complex(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace detail

struct BchOptions {
  /// Depth of the alpha table used for the convergence radius.
  int premise_depth = 12;
  AlphaOptions alpha;
};

/// Phi_k of the symmetric product e^{X_1/2}..e^{X_G/2} e^{X_G/2}..e^{X_1/2}
/// with X_g = -i s H_g, plus its norm and the bound alpha_comm,k(sH)/k^2.
inline BchTermReport symmetric_bch_term(const HamiltonianSum& h, int k, double s,
                                        const BchOptions& opt = {}) {
  require(k >= 1, ErrorKind::InvalidArgument, "k must be >= 1");
  require(k <= defaults::kSymmetricDepthCap, ErrorKind::DepthCap,
          "symmetric BCH terms limited to k <= 7");
  BchTermReport r;
  r.k = k;
  const auto table = commutator_table(h, std::max(k, opt.premise_depth), opt.alpha);
  r.bound = table.alpha(k) * std::pow(std::abs(s), k) / (static_cast<double>(k) * k);
  r.converged_premise = std::abs(s) <= convergence_radius(table);
  if (k % 2 == 0) {
    r.phi_value = DenseOperator::zero(h.dim());
    r.structural_zero = true;
    return r;
  }
  const auto coeff = detail::symmetric_word_coefficients(h.size(), k);
  const Complex scale = detail::pow_complex(Complex(0.0, -s / 2.0), k);
  r.phi_value = DenseOperator(scale * detail::evaluate_words(h, coeff));
  r.norm = spectral_norm(r.phi_value);
  return r;
}

/// E_j = Phi_j / s^j, i.e. Phi_j evaluated at s = 1.
inline DenseOperator e_j_operator(const HamiltonianSum& h, int j) {
  require(j >= 3 && j % 2 == 1, ErrorKind::InvalidArgument, "j must be odd >= 3");
  require(j <= defaults::kSymmetricDepthCap, ErrorKind::DepthCap,
          "E_j limited to j <= 7");
  const auto coeff = detail::symmetric_word_coefficients(h.size(), j);
  const Complex scale = detail::pow_complex(Complex(0.0, -0.5), j);
  return DenseOperator(scale * detail::evaluate_words(h, coeff));
}

/// Z_K = -iHs + sum_{odd 3 <= k <= K} Phi_k, so that U_2(s) ~ exp(Z_K).
inline DenseOperator effective_generator(const HamiltonianSum& h, double s, int K,
                                         const BchOptions& opt = {}) {
  require(K >= 1 && K % 2 == 1, ErrorKind::InvalidArgument, "K must be odd >= 1");
  require(K <= defaults::kSymmetricDepthCap, ErrorKind::DepthCap,
          "effective generator limited to K <= 7");
  const auto table = commutator_table(h, opt.premise_depth, opt.alpha);
  require(std::abs(s) <= convergence_radius(table), ErrorKind::ConvergenceRisk,
          "s outside the estimated convergence radius");
  Matrix z = Complex(0.0, -s) * h.dense();
  for (int k = 3; k <= K; k += 2) {
    const auto coeff = detail::symmetric_word_coefficients(h.size(), k);
    z += detail::pow_complex(Complex(0.0, -s / 2.0), k) *
         detail::evaluate_words(h, coeff);
  }
  return DenseOperator(std::move(z), Structure::anti_hermitian);
}

/// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "quadrature order must be >= 1");
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    q.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

struct DysonResult {
  DenseOperator approx;
  /// ||B||^p / p!
  double remainder_bound = 0.0;
  /// Largest difference between the last two quadrature orders, over l.
  double quadrature_error = 0.0;
  /// Quadrature points per axis used for each l = 1..p-1.
  std::vector<int> orders;
};

/// e^A + sum_{l=1}^{p-1} I_l with
/// I_l = int_{1 >= s_1 >= ... >= s_l >= 0} e^{A(1-s_1)} B e^{A(s_1-s_2)} B ...
///       B e^{A s_l}.
/// Each I_l is a tensor Gauss-Legendre rule on the cube mapped to the simplex
/// by s_i = u_1 ... u_i; the order rises until two successive orders agree.
inline DysonResult dyson_expansion(const DenseOperator& a, const DenseOperator& b,
                                   int p, double tol = defaults::kQuadratureTol) {
  require(a.dim() == b.dim(), ErrorKind::DimMismatch, "dyson_expansion");
  require(p >= 1, ErrorKind::InvalidArgument, "p must be >= 1");
  require(max_abs_deviation_from_anti_hermitian(a.matrix()) <= defaults::kStructuralTol,
          ErrorKind::NotAntiHermitian, "A");
  require(max_abs_deviation_from_anti_hermitian(b.matrix()) <= defaults::kStructuralTol,
          ErrorKind::NotAntiHermitian, "B");

  Matrix ia = kI * a.matrix();
  ia = 0.5 * (ia + ia.adjoint()).eval();
  const HermitianEigensystem eig(ia);
  auto exp_a = [&](double t) { return eig.evolve(t); };  // e^{At} = e^{-i t (iA)}

  const Matrix& bm = b.matrix();
  const double bnorm = spectral_norm(bm);
  DysonResult out;
  double fact = 1.0;
  for (int i = 2; i <= p; ++i) fact *= i;
  out.remainder_bound = std::pow(bnorm, p) / fact;

  Matrix total = exp_a(1.0);
  double l_fact = 1.0;
  for (int l = 1; l < p; ++l) {
    l_fact *= l;
    const double target = std::max(tol * std::pow(bnorm, l) / l_fact, 1e-15);
    auto integrate = [&](int n) {
      const Quadrature q = gauss_legendre(n);
      Matrix acc = Matrix::Zero(a.dim(), a.dim());
      std::vector<int> idx(static_cast<std::size_t>(l), 0);
      while (true) {
        double weight = 1.0;
        std::vector<double> s(static_cast<std::size_t>(l));
        double prod = 1.0;
        for (int i = 0; i < l; ++i) {
          const double u = q.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
          weight *= q.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] *
                    std::pow(u, l - 1 - i);
          prod *= u;
          s[static_cast<std::size_t>(i)] = prod;
        }
        Matrix term = exp_a(1.0 - s[0]);
        for (int i = 0; i < l; ++i) {
          const double next = i + 1 < l ? s[static_cast<std::size_t>(i + 1)] : 0.0;
          term = (term * bm * exp_a(s[static_cast<std::size_t>(i)] - next)).eval();
        }
        acc += weight * term;
        int pos = l - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == n) {
          idx[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
      return acc;
    };
    int n = 4;
    Matrix prev = integrate(n);
    double diff = 0.0;
    const int n_max = l == 1 ? 64 : (l == 2 ? 32 : 16);
    while (true) {
      const int next_n = n + 4;
      Matrix cur = integrate(next_n);
      diff = spectral_norm(cur - prev);
      prev = std::move(cur);
      n = next_n;
      if (diff <= target || n >= n_max) break;
    }
    out.orders.push_back(n);
    out.quadrature_error = std::max(out.quadrature_error, diff);
    total += prev;
  }
  out.approx = DenseOperator(std::move(total));
  return out;
}

/// Evaluated right-hand sides of the error representation for
/// U_2(Delta/k)^k with truncation p, and of the short-time MPF bound.
struct ErrorBudget {
  /// Bounds on ||E~_{j+1,p}(Delta)|| for even j.
  std::map<int, double> e_tilde_bounds;
  double f_tilde_bound = 0.0;
  /// ||a||_1 sum_{even j >= 2m}^{j_cap} sum_{l=1}^{m} Delta^{j+l}/l! S(j,l)
  double thm_bound = 0.0;
  int truncation_depth = 0;
  /// The neglected tail may not be small: the last slices decay slower than
  /// the tolerance.
  bool tail_flag = false;
  bool truncated = true;
};

/// Budget for an MPF with target m and coefficient norm a_norm; p = m in the
/// error representation. Requires alpha up to depth j_cap + 1.
inline ErrorBudget error_budget(const CommutatorTable& table, double delta, int m,
                                double a_norm, int j_cap) {
  require(delta > 0, ErrorKind::NonPositive, "Delta must be positive");
  require(m >= 1, ErrorKind::InvalidArgument, "m must be >= 1");
  require(j_cap >= 2 * m, ErrorKind::InvalidArgument, "j_cap must be >= 2m");
  const Variant v = Variant::second_order();
  const CompositionSums sums(table, v, j_cap);
  const int p = m;
  auto term = [&](int j, int l) {
    // Delta^{j+l} S(j,l), all in logs.
    const double ls = sums.log_sum(j, l);
    if (ls == kNegInf) return 0.0;
    return std::exp(ls + (j + l) * std::log(delta));
  };
  double fact[64];
  fact[0] = 1.0;
  for (int i = 1; i < 64; ++i) fact[i] = fact[i - 1] * i;

  ErrorBudget b;
  b.truncation_depth = j_cap;
  for (int j = 2; j <= j_cap; j += 2) {
    double e = 0.0;
    for (int l = 1; l <= std::min(j / 2, p - 1); ++l) e += term(j, l) / fact[l];
    b.e_tilde_bounds[j] = e;
  }
  for (int j = 2 * p; j <= j_cap; j += 2) b.f_tilde_bound += term(j, p) / fact[p];

  std::vector<double> slices;
  for (int j = 2 * m; j <= j_cap; j += 2) {
    double slice = 0.0;
    for (int l = 1; l <= m; ++l) slice += term(j, l) / fact[l];
    slices.push_back(a_norm * slice);
    b.thm_bound += a_norm * slice;
  }
  // Geometric estimate of the tail beyond j_cap from the last two slices.
  if (slices.size() >= 2 && b.thm_bound > 0.0) {
    const double last = slices.back();
    const double prev = slices[slices.size() - 2];
    if (prev > 0.0) {
      const double ratio = last / prev;
      const double tail = ratio < 1.0 ? last * ratio / (1.0 - ratio)
                                      : std::numeric_limits<double>::infinity();
      b.tail_flag = tail > defaults::kBoundTailTol * b.thm_bound;
    } else {
      b.tail_flag = last > 0.0;
    }
  }
  return b;
}

}  // namespace mpflab
