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
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpflab/error.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/pauli.hpp"

namespace mpflab {

/// coefficient * P for a Hermitian Pauli string P.
struct PauliTerm {
  double coefficient = 1.0;
  PauliString pauli;
};

/// One Hermitian summand H_gamma. Either a Pauli term or an arbitrary dense
/// Hermitian matrix; `group` holds the optional multi-index label
/// (i_1, ..., i_k) used by the induced 1-norm.
class HamiltonianTerm {
 public:
  HamiltonianTerm(PauliTerm term, std::vector<int> group = {})
      : body_(std::move(term)), group_(std::move(group)) {
    const auto& t = std::get<PauliTerm>(body_);
    require(std::isfinite(t.coefficient), ErrorKind::InvalidArgument,
            "term coefficient must be finite");
    norm_ = std::abs(t.coefficient);
  }

  HamiltonianTerm(DenseOperator op, std::vector<int> group = {})
      : body_(std::move(op)), group_(std::move(group)) {
    const auto& m = std::get<DenseOperator>(body_).matrix();
    require((m - m.adjoint()).cwiseAbs().maxCoeff() <= defaults::kHermitianTol,
            ErrorKind::InvalidArgument, "dense term is not Hermitian");
    norm_ = spectral_norm(m);
  }

  bool is_pauli() const { return std::holds_alternative<PauliTerm>(body_); }
  const PauliTerm& pauli() const { return std::get<PauliTerm>(body_); }
  const DenseOperator& dense_operator() const {
    return std::get<DenseOperator>(body_);
  }

  Eigen::Index dim() const {
    if (is_pauli()) return Eigen::Index{1} << pauli().pauli.n_qubits();
    return dense_operator().dim();
  }

  /// Spectral norm; |coefficient| for Pauli terms.
  double norm() const { return norm_; }

  const std::vector<int>& group() const { return group_; }

  Matrix dense() const {
    if (is_pauli()) return pauli().coefficient * pauli().pauli.dense();
    return dense_operator().matrix();
  }

 private:
  std::variant<PauliTerm, DenseOperator> body_;
  std::vector<int> group_;
  double norm_ = 0.0;
};

/// H = sum_gamma H_gamma with a fixed, meaningful term order.
class HamiltonianSum {
 public:
  explicit HamiltonianSum(std::vector<HamiltonianTerm> terms)
      : terms_(std::move(terms)) {
    require(!terms_.empty(), ErrorKind::EmptyList,
            "a Hamiltonian needs at least one term");
    dim_ = terms_.front().dim();
    for (const auto& t : terms_) {
      require(t.dim() == dim_, ErrorKind::DimMismatch,
              "all terms must act on the same space");
    }
  }

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  const HamiltonianTerm& term(std::size_t i) const { return terms_.at(i); }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

  bool is_pauli() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.is_pauli(); });
  }

  bool has_grouping() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return !t.group().empty(); });
  }

  Matrix dense() const {
    Matrix h = Matrix::Zero(dim_, dim_);
    for (const auto& t : terms_) h += t.dense();
    return h;
  }

  std::vector<DenseOperator> dense_terms() const {
    std::vector<DenseOperator> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      out.emplace_back(t.dense(), Structure::hermitian);
    }
    return out;
  }

 private:
  std::vector<HamiltonianTerm> terms_;
  Eigen::Index dim_ = 1;
};

/// sum_gamma ||H_gamma||
inline double one_norm(const HamiltonianSum& h) {
  double total = 0.0;
  for (const auto& t : h.terms()) total += t.norm();
  return total;
}

/// Largest total norm of the terms whose label contains a given index value,
/// i.e. the per-site interaction strength of a local Hamiltonian. A label that
/// repeats a value, such as the on-site label (i, i), counts once.
inline double induced_one_norm(const HamiltonianSum& h) {
  require(h.has_grouping(), ErrorKind::NoGrouping,
          "induced 1-norm needs a multi-index label on every term");
  std::map<int, double> per_index;
  for (const auto& t : h.terms()) {
    std::vector<int> labels = t.group();
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (int v : labels) per_index[v] += t.norm();
  }
  double best = 0.0;
  for (const auto& [index, total] : per_index) best = std::max(best, total);
  return best;
}

/// sum_j (X_j X_{j+1} + Y_j Y_{j+1} + Z_j Z_{j+1}); bonds j = 0..n-1 when
/// periodic (the last wraps to site 0), 0..n-2 otherwise. Terms are ordered by
/// bond, then X, Y, Z, each labelled by its bond (j, j+1 mod n). For n = 2 the
/// periodic wrap bond duplicates bond 0 and both copies are kept.
inline HamiltonianSum heisenberg_1d(int n, bool periodic) {
  require(n >= 2, ErrorKind::TooSmall, "Heisenberg chain needs n >= 2");
  require(n <= 64, ErrorKind::InvalidArgument, "at most 64 sites");
  const int bonds = periodic ? n : n - 1;
  std::vector<HamiltonianTerm> terms;
  terms.reserve(static_cast<std::size_t>(3 * bonds));
  for (int j = 0; j < bonds; ++j) {
    const int a = j;
    const int b = (j + 1) % n;
    for (char letter : {'X', 'Y', 'Z'}) {
      auto p = PauliString::from_sites(n, {{a, letter}, {b, letter}});
      terms.emplace_back(PauliTerm{1.0, p}, std::vector<int>{a, b});
    }
  }
  return HamiltonianSum(std::move(terms));
}

namespace detail {

inline std::optional<int> integer_root(int n, int d) {
  if (n < 1 || d < 1) return std::nullopt;
  const int side =
      static_cast<int>(std::lround(std::pow(static_cast<double>(n), 1.0 / d)));
  for (int s = std::max(1, side - 1); s <= side + 1; ++s) {
    std::int64_t p = 1;
    for (int k = 0; k < d; ++k) p *= s;
    if (p == n) return s;
  }
  return std::nullopt;
}

inline std::vector<int> lattice_coordinates(int site, int side, int d) {
  std::vector<int> coords(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    coords[static_cast<std::size_t>(k)] = site % side;
    site /= side;
  }
  return coords;
}

inline char random_letter(std::mt19937_64& rng) {
  // Raw engine output keeps the sequence identical across standard libraries.
  return "XYZ"[rng() % 3];
}

}  // namespace detail

/// Euclidean lattice distance between two sites of an n-site, d-dimensional
/// square lattice with sites numbered in row-major order.
inline double lattice_distance(int i, int j, int side, int d) {
  const auto a = detail::lattice_coordinates(i, side, d);
  const auto b = detail::lattice_coordinates(j, side, d);
  double sq = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

/// Power-law Hamiltonian on an n-site d-dimensional square lattice. One term
/// per unordered site pair {i, j} (i <= j), listed lexicographically: an
/// on-site random Pauli with norm 1, or a random two-site Pauli string whose
/// coefficient equals dist(i, j)^(-alpha). Letters come from `seed`.
inline HamiltonianSum power_law_lattice(int n, int d, double alpha,
                                        std::uint64_t seed) {
  require(alpha >= 0.0, ErrorKind::InvalidArgument, "alpha must be >= 0");
  const auto side = detail::integer_root(n, d);
  require(side.has_value(), ErrorKind::NotLattice,
          std::to_string(n) + " is not a perfect power of d=" +
              std::to_string(d));
  require(n <= 64, ErrorKind::InvalidArgument, "at most 64 sites");
  std::mt19937_64 rng(seed);
  std::vector<HamiltonianTerm> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i == j) {
        auto p = PauliString::from_sites(n, {{i, detail::random_letter(rng)}});
        terms.emplace_back(PauliTerm{1.0, p}, std::vector<int>{i, i});
      } else {
        const double dist = lattice_distance(i, j, *side, d);
        const double coeff = std::pow(dist, -alpha);
        auto p = PauliString::from_sites(
            n, {{i, detail::random_letter(rng)}, {j, detail::random_letter(rng)}});
        terms.emplace_back(PauliTerm{coeff, p}, std::vector<int>{i, j});
      }
    }
  }
  return HamiltonianSum(std::move(terms));
}

/// Builds a Hamiltonian from (coefficient, site -> letter, label) triples.
struct PauliTermSpec {
  double coefficient = 1.0;
  std::map<int, char> paulis;
  std::vector<int> group;

  friend bool operator==(const PauliTermSpec&, const PauliTermSpec&) = default;
};

inline HamiltonianSum from_pauli_specs(int n_qubits,
                                       const std::vector<PauliTermSpec>& specs) {
  std::vector<HamiltonianTerm> terms;
  terms.reserve(specs.size());
  for (const auto& s : specs) {
    terms.emplace_back(
        PauliTerm{s.coefficient, PauliString::from_sites(n_qubits, s.paulis)},
        s.group);
  }
  return HamiltonianSum(std::move(terms));
}

enum class ModelKind { heisenberg1d, power_law, custom };

/// Parameters that determine a Hamiltonian; the JSON model descriptor.
struct ModelDescriptor {
  ModelKind model = ModelKind::heisenberg1d;
  int n = 2;
  bool periodic = true;
  int d = 1;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<PauliTermSpec> terms;

  HamiltonianSum build() const {
    switch (model) {
      case ModelKind::heisenberg1d:
        return heisenberg_1d(n, periodic);
      case ModelKind::power_law:
        return power_law_lattice(n, d, alpha, seed);
      case ModelKind::custom:
        return from_pauli_specs(n, terms);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
  }

  friend bool operator==(const ModelDescriptor&, const ModelDescriptor&) = default;
};

}  // namespace mpflab
