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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "mpflab/defaults.hpp"
#include "mpflab/error.hpp"

namespace mpflab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Structural tag carried alongside an operator. Advisory only: nothing is
/// verified unless `DenseOperator::verify` is called.
enum class Structure { none, unitary, hermitian, anti_hermitian };

/// Square complex matrix with an optional structural hint.
class DenseOperator {
 public:
  DenseOperator() : matrix_(Matrix::Identity(1, 1)) {}

  explicit DenseOperator(Matrix matrix, Structure hint = Structure::none)
      : matrix_(std::move(matrix)), hint_(hint) {
    require(matrix_.rows() == matrix_.cols(), ErrorKind::NonSquare,
            "operator must be square, got " + std::to_string(matrix_.rows()) +
                "x" + std::to_string(matrix_.cols()));
    require(matrix_.rows() >= 1, ErrorKind::InvalidArgument,
            "operator dimension must be at least 1");
  }

  static DenseOperator identity(Eigen::Index dim) {
    return DenseOperator(Matrix::Identity(dim, dim), Structure::unitary);
  }
  static DenseOperator zero(Eigen::Index dim) {
    return DenseOperator(Matrix::Zero(dim, dim));
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Structure hint() const { return hint_; }

  DenseOperator with_hint(Structure hint) const {
    return DenseOperator(matrix_, hint);
  }

  DenseOperator adjoint() const {
    return DenseOperator(matrix_.adjoint(), hint_);
  }

  /// Checks the invariant implied by the hint. Operators tagged `none` always
  /// pass.
  bool verify() const {
    const double n = static_cast<double>(dim());
    switch (hint_) {
      case Structure::none:
        return true;
      case Structure::unitary:
        return (matrix_.adjoint() * matrix_ - Matrix::Identity(dim(), dim()))
                   .norm() <= defaults::kStructuralTol * n;
      case Structure::hermitian:
        return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <=
               defaults::kHermitianTol;
      case Structure::anti_hermitian:
        return (matrix_ + matrix_.adjoint()).cwiseAbs().maxCoeff() <=
               defaults::kStructuralTol;
    }
    return false;
  }

  friend DenseOperator operator+(const DenseOperator& a,
                                 const DenseOperator& b) {
    require(a.dim() == b.dim(), ErrorKind::DimMismatch, "operator sum");
    return DenseOperator(a.matrix_ + b.matrix_);
  }
  friend DenseOperator operator-(const DenseOperator& a,
                                 const DenseOperator& b) {
    require(a.dim() == b.dim(), ErrorKind::DimMismatch, "operator difference");
    return DenseOperator(a.matrix_ - b.matrix_);
  }
  friend DenseOperator operator*(const DenseOperator& a,
                                 const DenseOperator& b) {
    require(a.dim() == b.dim(), ErrorKind::DimMismatch, "operator product");
    return DenseOperator(a.matrix_ * b.matrix_);
  }
  friend DenseOperator operator*(Complex c, const DenseOperator& a) {
    return DenseOperator(c * a.matrix_);
  }
  friend DenseOperator operator*(double c, const DenseOperator& a) {
    Structure h = a.hint_ == Structure::unitary ? Structure::none : a.hint_;
    return DenseOperator(c * a.matrix_, h);
  }

 private:
  Matrix matrix_;
  Structure hint_ = Structure::none;
};

/// Amplitudes of a pure state. `normalized` records the caller's claim.
struct StateVector {
  Vector amplitudes;
  bool normalized = false;

  Eigen::Index dim() const { return amplitudes.size(); }

  static StateVector basis(Eigen::Index dim, Eigen::Index index) {
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return {std::move(v), true};
  }

  bool verify() const {
    return !normalized ||
           std::abs(amplitudes.norm() - 1.0) <= defaults::kStructuralTol;
  }
};

inline double max_abs_deviation_from_anti_hermitian(const Matrix& a) {
  return (a + a.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigendecomposition of a Hermitian matrix, reused for exp(-iHt) at many t.
class HermitianEigensystem {
 public:
  explicit HermitianEigensystem(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }

  /// exp(-i t H)
  Matrix evolve(double t) const {
    Vector phases(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      phases(i) = std::exp(Complex(0.0, -t * values_(i)));
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

 private:
  Eigen::VectorXd values_;
  Matrix vectors_;
};

/// exp(A) for anti-Hermitian A, computed from the Hermitian eigensystem of iA.
inline DenseOperator matrix_exponential(const DenseOperator& a) {
  const double dev = max_abs_deviation_from_anti_hermitian(a.matrix());
  require(dev <= defaults::kStructuralTol, ErrorKind::NotAntiHermitian,
          "entrywise deviation " + std::to_string(dev));
  // A = -i (iA), so exp(A) = exp(-i * 1 * (iA)).
  Matrix h = kI * a.matrix();
  h = 0.5 * (h + h.adjoint()).eval();
  return DenseOperator(HermitianEigensystem(h).evolve(1.0), Structure::unitary);
}

/// exp(-i t H) for Hermitian H.
inline DenseOperator exp_hermitian(const DenseOperator& h, double t) {
  Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  return DenseOperator(HermitianEigensystem(sym).evolve(t), Structure::unitary);
}

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorKind::NonSquare, "spectral_norm");
  require(a.rows() <= defaults::kMaxSvdDim, ErrorKind::InvalidArgument,
          "spectral_norm limited to dim <= 1024");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double spectral_norm(const DenseOperator& a) {
  return spectral_norm(a.matrix());
}

inline DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  require(a.dim() == b.dim(), ErrorKind::DimMismatch, "commutator");
  Matrix out = a.matrix() * b.matrix();
  out.noalias() -= b.matrix() * a.matrix();
  return DenseOperator(std::move(out));
}

/// [A1,[A2,...[A_{n-1},A_n]...]], evaluated from the innermost pair outward.
inline DenseOperator nested_commutator(std::span<const DenseOperator> ops) {
  require(!ops.empty(), ErrorKind::EmptyList, "nested_commutator");
  const auto dim = ops.front().dim();
  for (const auto& op : ops) {
    require(op.dim() == dim, ErrorKind::DimMismatch, "nested_commutator");
  }
  Matrix acc = ops.back().matrix();
  for (auto it = ops.rbegin() + 1; it != ops.rend(); ++it) {
    Matrix next = it->matrix() * acc;
    next.noalias() -= acc * it->matrix();
    acc = std::move(next);
  }
  return DenseOperator(std::move(acc));
}

/// A * psi, no renormalization.
inline StateVector apply(const DenseOperator& a, const StateVector& psi) {
  require(a.dim() == psi.dim(), ErrorKind::DimMismatch, "apply");
  return {a.matrix() * psi.amplitudes, false};
}

/// Principal logarithm of a unitary via its Schur form (diagonal for normal
/// matrices). Eigenphases must stay off the branch cut at -1.
inline DenseOperator matrix_log_unitary(const DenseOperator& u) {
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  Vector logs(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) logs(i) = std::log(t(i, i));
  return DenseOperator(q * logs.asDiagonal() * q.adjoint());
}

/// Integer power by repeated squaring.
inline Matrix matrix_power(Matrix base, std::int64_t k) {
  require(k >= 0, ErrorKind::InvalidArgument, "negative matrix power");
  Matrix result = Matrix::Identity(base.rows(), base.cols());
  bool first = true;
  while (k > 0) {
    if (k & 1) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = (result * base).eval();
      }
    }
    k >>= 1;
    if (k > 0) base = (base * base).eval();
  }
  return result;
}

inline double distance_from_identity(const Matrix& a) {
  return spectral_norm(a - Matrix::Identity(a.rows(), a.cols()));
}

}  // namespace mpflab
