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

#include <cstddef>
#include <cstdint>

/// Numeric defaults shared by the library and the command-line front end.
///
/// | name                         | value  | used by                           |
/// |------------------------------|--------|-----------------------------------|
/// | kStructuralTol               | 1e-10  | anti-Hermitian / unitary checks   |
/// | kHermitianTol                | 1e-12  | Hermitian hint verification       |
/// | kMaxSvdDim                   | 1024   | spectral_norm                     |
/// | kNoiseFloor                  | 1e-12  | convergence fits, dominance slack |
/// | kAlphaBudget                 | 1e7    | dense alpha enumeration           |
/// | kPhiDepthCap                 | 8      | phi_k permutation enumeration     |
/// | kSymmetricDepthCap           | 7      | symmetric BCH terms               |
/// | kSymmetricWorkBudget         | 2e8    | symmetric BCH enumeration         |
/// | kMaxCompositionDepth         | 24     | lambda_{j,l} (explicit)           |
/// | kDefaultJCapSlack            | 8      | mu_m truncation is 2m + slack     |
/// | kBoundTailTol                | 1e-2   | error-bound tail flag             |
/// | kMaxSteps                    | 1e6    | minimal-r search                  |
/// | kGridPoints / kGridRatio     | 6 / 2  | convergence grids                 |
/// | kGridTopError                | 0.1    | convergence grid auto-shrink      |
/// | kQuadratureTol               | 1e-10  | simplex quadrature                |
/// | kMaxPower                    | 1e5    | MPF step powers                   |
namespace mpflab::defaults {

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr int kMaxSvdDim = 1024;
inline constexpr double kNoiseFloor = 1e-12;
inline constexpr std::uint64_t kAlphaBudget = 10'000'000;
inline constexpr int kPhiDepthCap = 8;
inline constexpr int kSymmetricDepthCap = 7;
inline constexpr double kSymmetricWorkBudget = 2e8;
inline constexpr int kMaxCompositionDepth = 24;
inline constexpr int kDefaultJCapSlack = 8;
inline constexpr double kBoundTailTol = 1e-2;
inline constexpr std::int64_t kMaxSteps = 1'000'000;
inline constexpr int kGridPoints = 6;
inline constexpr double kGridRatio = 2.0;
inline constexpr double kGridTopError = 0.1;
inline constexpr double kQuadratureTol = 1e-10;
inline constexpr std::int64_t kMaxPower = 100'000;

}  // namespace mpflab::defaults
