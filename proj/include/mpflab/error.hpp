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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpflab {

enum class ErrorKind {
  NonSquare,
  NotAntiHermitian,
  DimMismatch,
  EmptyList,
  TooSmall,
  NotLattice,
  NoGrouping,
  DuplicatePowers,
  SingularSystem,
  SizeMismatch,
  NonPositive,
  DepthCap,
  ConvergenceRisk,
  BudgetExceeded,
  MissingAlpha,
  PartitionBlowup,
  BadRegime,
  DegenerateGrid,
  PremiseViolated,
  Infeasible,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotAntiHermitian: return "NotAntiHermitian";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::NotLattice: return "NotLattice";
    case ErrorKind::NoGrouping: return "NoGrouping";
    case ErrorKind::DuplicatePowers: return "DuplicatePowers";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::DepthCap: return "DepthCap";
    case ErrorKind::ConvergenceRisk: return "ConvergenceRisk";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MissingAlpha: return "MissingAlpha";
    case ErrorKind::PartitionBlowup: return "PartitionBlowup";
    case ErrorKind::BadRegime: return "BadRegime";
    case ErrorKind::DegenerateGrid: return "DegenerateGrid";
    case ErrorKind::PremiseViolated: return "PremiseViolated";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace mpflab
