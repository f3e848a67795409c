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

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "mpflab/error.hpp"
#include "mpflab/operator.hpp"

namespace mpflab {

/// Hermitian Pauli string on up to 64 qubits in symplectic form.
///
/// Qubit q maps to bit q of both masks: (x,z) = (1,0) is X, (0,1) is Z and
/// (1,1) is Y. Dense matrices use qubit 0 as the least significant bit of the
/// basis index, i.e. P = P_{n-1} (x) ... (x) P_0.
class PauliString {
 public:
  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x, std::uint64_t z)
      : n_qubits_(n_qubits), x_(x), z_(z) {
    require(n_qubits >= 1 && n_qubits <= 64, ErrorKind::InvalidArgument,
            "Pauli strings support 1..64 qubits");
    const std::uint64_t mask =
        n_qubits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_qubits) - 1;
    require(((x | z) & ~mask) == 0, ErrorKind::InvalidArgument,
            "Pauli site out of range");
  }

  /// Builds from a site -> letter map; letters are 'X', 'Y', 'Z' (or 'I').
  static PauliString from_sites(int n_qubits, const std::map<int, char>& sites) {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (const auto& [site, letter] : sites) {
      require(site >= 0 && site < n_qubits, ErrorKind::InvalidArgument,
              "Pauli site " + std::to_string(site) + " out of range");
      const std::uint64_t bit = std::uint64_t{1} << site;
      switch (letter) {
        case 'X': x |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        case 'Z': z |= bit; break;
        case 'I': break;
        default:
          throw Error(ErrorKind::InvalidArgument,
                      std::string("unknown Pauli letter ") + letter);
      }
    }
    return PauliString(n_qubits, x, z);
  }

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t z() const { return z_; }
  std::uint64_t support() const { return x_ | z_; }
  int weight() const { return std::popcount(support()); }
  bool is_identity() const { return support() == 0; }

  char letter(int q) const {
    const bool xb = (x_ >> q) & 1U;
    const bool zb = (z_ >> q) & 1U;
    if (xb && zb) return 'Y';
    if (xb) return 'X';
    if (zb) return 'Z';
    return 'I';
  }

  std::map<int, char> sites() const {
    std::map<int, char> out;
    for (int q = 0; q < n_qubits_; ++q) {
      if (letter(q) != 'I') out.emplace(q, letter(q));
    }
    return out;
  }

  /// Letters for qubits 0..n-1, left to right.
  std::string to_string() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_qubits_));
    for (int q = 0; q < n_qubits_; ++q) s.push_back(letter(q));
    return s;
  }

  bool commutes_with(const PauliString& other) const {
    return std::popcount((x_ & other.z_) ^ (z_ & other.x_)) % 2 == 0;
  }

  /// <c ^ x| P |c> for basis index c.
  Complex column_phase(std::uint64_t c) const {
    int e = std::popcount(x_ & z_) + 2 * std::popcount(c & z_);
    return ipow(e);
  }

  Matrix dense() const {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
    Matrix m = Matrix::Zero(dim, dim);
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
      m(static_cast<Eigen::Index>(c ^ x_), static_cast<Eigen::Index>(c)) =
          column_phase(c);
    }
    return m;
  }

  static Complex ipow(int e) {
    switch (((e % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) {
    if (auto c = a.x_ <=> b.x_; c != 0) return c;
    return a.z_ <=> b.z_;
  }

 private:
  int n_qubits_ = 1;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// i^phase * string.
struct PhasedPauli {
  int phase = 0;  // exponent of i, mod 4
  PauliString string;
};

/// Product a*b with the phase tracked exactly.
inline PhasedPauli multiply(const PauliString& a, const PauliString& b) {
  require(a.n_qubits() == b.n_qubits(), ErrorKind::DimMismatch,
          "Pauli product");
  // Single-site products: X*Y = iZ, Y*Z = iX, Z*X = iY, reversed order -i.
  int e = 0;
  for (int q = 0; q < a.n_qubits(); ++q) {
    const char p = a.letter(q);
    const char r = b.letter(q);
    if (p == 'I' || r == 'I' || p == r) continue;
    const bool cyclic = (p == 'X' && r == 'Y') || (p == 'Y' && r == 'Z') ||
                        (p == 'Z' && r == 'X');
    e += cyclic ? 1 : 3;
  }
  return {e % 4, PauliString(a.n_qubits(), a.x() ^ b.x(), a.z() ^ b.z())};
}

/// [a, b] = 0 or 2 a b; returns false when the strings commute.
inline bool commutator(const PauliString& a, const PauliString& b,
                       PhasedPauli& out) {
  if (a.commutes_with(b)) return false;
  out = multiply(a, b);
  return true;
}

/// M <- exp(-i theta P) M, in place, O(dim^2).
inline void left_multiply_rotation(Matrix& m, const PauliString& p,
                                   double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const auto dim = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t x = p.x();
  if (x == 0) {
    for (std::uint64_t r = 0; r < dim; ++r) {
      const Complex f = c - kI * s * p.column_phase(r);
      m.row(static_cast<Eigen::Index>(r)) *= f;
    }
    return;
  }
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    Complex* column = m.col(col).data();
    for (std::uint64_t a = 0; a < dim; ++a) {
      const std::uint64_t b = a ^ x;
      if (b < a) continue;
      // (P M)_a = phase(b) M_b and (P M)_b = phase(a) M_a.
      const Complex fa = -kI * s * p.column_phase(b);
      const Complex fb = -kI * s * p.column_phase(a);
      const Complex ma = column[a];
      const Complex mb = column[b];
      column[a] = c * ma + fa * mb;
      column[b] = c * mb + fb * ma;
    }
  }
}

}  // namespace mpflab
