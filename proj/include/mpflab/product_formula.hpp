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

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mpflab/error.hpp"
#include "mpflab/hamiltonian.hpp"
#include "mpflab/operator.hpp"
#include "mpflab/pauli.hpp"

namespace mpflab {

/// s_p = 1 / (4 - 4^{1/(2p+1)})
inline double suzuki_coefficient(int p) {
  require(p >= 1, ErrorKind::InvalidArgument, "suzuki_coefficient needs p >= 1");
  return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * p + 1.0)));
}

/// Factor exp(-i * weight * t * H_term).
struct Stage {
  std::size_t term = 0;
  double weight = 1.0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

/// A product formula as a flat list of stages, leftmost factor first.
class ProductFormulaSpec {
 public:
  /// e^{-itH_1} ... e^{-itH_G}
  static ProductFormulaSpec first_order(std::size_t gamma) {
    require(gamma >= 1, ErrorKind::EmptyList, "formula needs at least one term");
    std::vector<Stage> stages;
    for (std::size_t g = 0; g < gamma; ++g) stages.push_back({g, 1.0});
    return ProductFormulaSpec(1, gamma, std::move(stages));
  }

  /// e^{-itH_1/2} ... e^{-itH_G/2} e^{-itH_G/2} ... e^{-itH_1/2}
  static ProductFormulaSpec second_order(std::size_t gamma) {
    require(gamma >= 1, ErrorKind::EmptyList, "formula needs at least one term");
    std::vector<Stage> stages;
    for (std::size_t g = 0; g < gamma; ++g) stages.push_back({g, 0.5});
    for (std::size_t g = gamma; g-- > 0;) stages.push_back({g, 0.5});
    return ProductFormulaSpec(2, gamma, std::move(stages));
  }

  /// Order 2p symmetric formula from the Suzuki recursion
  /// U_{2q+2}(t) = U_{2q}(s_q t)^2 U_{2q}((1 - 4 s_q) t) U_{2q}(s_q t)^2.
  static ProductFormulaSpec suzuki(std::size_t gamma, int p) {
    require(p >= 1, ErrorKind::InvalidArgument, "Suzuki order needs p >= 1");
    ProductFormulaSpec spec = second_order(gamma);
    for (int q = 1; q < p; ++q) {
      const double s = suzuki_coefficient(q);
      std::vector<Stage> next;
      next.reserve(spec.stages_.size() * 5);
      for (double scale : {s, s, 1.0 - 4.0 * s, s, s}) {
        for (const auto& st : spec.stages_) {
          next.push_back({st.term, st.weight * scale});
        }
      }
      spec = ProductFormulaSpec(2 * (q + 1), gamma, std::move(next));
    }
    return spec;
  }

  /// 1, 2, or any even order.
  static ProductFormulaSpec of_order(std::size_t gamma, int order) {
    if (order == 1) return first_order(gamma);
    require(order >= 2 && order % 2 == 0, ErrorKind::InvalidArgument,
            "formula order must be 1 or even, got " + std::to_string(order));
    return suzuki(gamma, order / 2);
  }

  int order() const { return order_; }
  std::size_t gamma() const { return gamma_; }
  const std::vector<Stage>& stages() const { return stages_; }
  bool symmetric() const { return order_ % 2 == 0; }

  /// Adjacent stages on the same term fused into one factor.
  std::vector<Stage> fused_stages() const {
    std::vector<Stage> out;
    for (const auto& st : stages_) {
      if (!out.empty() && out.back().term == st.term) {
        out.back().weight += st.weight;
      } else {
        out.push_back(st);
      }
    }
    return out;
  }

 private:
  ProductFormulaSpec(int order, std::size_t gamma, std::vector<Stage> stages)
      : order_(order), gamma_(gamma), stages_(std::move(stages)) {}

  int order_ = 1;
  std::size_t gamma_ = 1;
  std::vector<Stage> stages_;
};

/// A formula bound to a Hamiltonian. Pauli terms are applied as in-place
/// rotations; dense terms reuse one eigendecomposition per term.
class ProductFormula {
 public:
  ProductFormula(const HamiltonianSum& h, ProductFormulaSpec spec)
      : h_(std::make_shared<const HamiltonianSum>(h)),
        spec_(std::move(spec)),
        fused_(spec_.fused_stages()) {
    require(spec_.gamma() == h_->size(), ErrorKind::SizeMismatch,
            "formula built for a different number of terms");
    eig_.resize(h_->size());
    for (std::size_t g = 0; g < h_->size(); ++g) {
      const auto& term = h_->term(g);
      if (!term.is_pauli()) {
        eig_[g] = std::make_shared<const HermitianEigensystem>(term.dense());
      }
    }
  }

  const ProductFormulaSpec& spec() const { return spec_; }
  const HamiltonianSum& hamiltonian() const { return *h_; }
  Eigen::Index dim() const { return h_->dim(); }

  /// block <- U(t) * block
  void apply_to(Matrix& block, double t) const {
    require(block.rows() == dim(), ErrorKind::DimMismatch, "formula apply");
    std::map<std::pair<std::size_t, double>, Matrix> cache;
    for (auto it = fused_.rbegin(); it != fused_.rend(); ++it) {
      const auto& term = h_->term(it->term);
      const double tau = it->weight * t;
      if (term.is_pauli()) {
        left_multiply_rotation(block, term.pauli().pauli,
                               tau * term.pauli().coefficient);
        continue;
      }
      auto key = std::make_pair(it->term, tau);
      auto found = cache.find(key);
      if (found == cache.end()) {
        found = cache.emplace(key, eig_[it->term]->evolve(tau)).first;
      }
      block = (found->second * block).eval();
    }
  }

  Matrix matrix(double t) const {
    Matrix u = Matrix::Identity(dim(), dim());
    apply_to(u, t);
    return u;
  }

  DenseOperator evaluate(double t) const {
    return DenseOperator(matrix(t), Structure::unitary);
  }

  /// (U(delta / k))^k
  Matrix powered(double delta, std::int64_t k) const {
    require(k >= 1, ErrorKind::NonPositive, "power must be >= 1");
    return matrix_power(matrix(delta / static_cast<double>(k)), k);
  }

  StateVector apply(const StateVector& psi, double t) const {
    require(psi.dim() == dim(), ErrorKind::DimMismatch, "formula apply");
    Matrix block = psi.amplitudes;
    apply_to(block, t);
    return {block.col(0), psi.normalized};
  }

 private:
  std::shared_ptr<const HamiltonianSum> h_;
  ProductFormulaSpec spec_;
  std::vector<Stage> fused_;
  std::vector<std::shared_ptr<const HermitianEigensystem>> eig_;
};

inline DenseOperator trotter_u1(const HamiltonianSum& h, double t) {
  return ProductFormula(h, ProductFormulaSpec::first_order(h.size())).evaluate(t);
}

inline DenseOperator trotter_u2(const HamiltonianSum& h, double t) {
  return ProductFormula(h, ProductFormulaSpec::second_order(h.size())).evaluate(t);
}

/// Order 2p; p = 1 is the second-order formula.
inline DenseOperator suzuki_u2p(const HamiltonianSum& h, double t, int p) {
  return ProductFormula(h, ProductFormulaSpec::suzuki(h.size(), p)).evaluate(t);
}

inline DenseOperator powered_formula(const HamiltonianSum& h, double delta,
                                     std::int64_t k,
                                     const ProductFormulaSpec& base) {
  return DenseOperator(ProductFormula(h, base).powered(delta, k),
                       Structure::unitary);
}

}  // namespace mpflab
