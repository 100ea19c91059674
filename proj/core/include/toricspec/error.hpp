/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toricspec {

enum class ErrorCode {
  // polytope
  Unbounded,
  EmptyInterior,
  NotDelzant,
  RedundantFacet,
  NonPrimitiveNormal,
  DimensionUnsupported,
  PointOutside,
  // potential
  BoundaryPoint,
  NotPositiveDefinite,
  ChartMismatch,
  ModeOutsidePolytope,
  // curvature
  SingularG,
  SingularA,
  RegionTouchesCodimTwo,
  StepTooLarge,
  // operator
  NotPositiveDefiniteMass,
  CoefficientOverflow,
  CholeskyFailure,
  ConvergenceFailure,
  NegativeEigenvalue,
  // limit
  ChartFailure,
  NotSeparable,
  TruncationTooSmall,
  // harness
  PartialReport,
  IoFailure,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

  // True for failures of the numerical backend rather than of the input.
  bool is_solver_failure() const {
    return code_ == ErrorCode::CholeskyFailure || code_ == ErrorCode::ConvergenceFailure ||
           code_ == ErrorCode::NegativeEigenvalue || code_ == ErrorCode::CoefficientOverflow ||
           code_ == ErrorCode::TruncationTooSmall || code_ == ErrorCode::NotPositiveDefiniteMass;
  }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::NotDelzant: return "NotDelzant";
    case ErrorCode::RedundantFacet: return "RedundantFacet";
    case ErrorCode::NonPrimitiveNormal: return "NonPrimitiveNormal";
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::PointOutside: return "PointOutside";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ChartMismatch: return "ChartMismatch";
    case ErrorCode::ModeOutsidePolytope: return "ModeOutsidePolytope";
    case ErrorCode::SingularG: return "SingularG";
    case ErrorCode::SingularA: return "SingularA";
    case ErrorCode::RegionTouchesCodimTwo: return "RegionTouchesCodimTwo";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NotPositiveDefiniteMass: return "NotPositiveDefiniteMass";
    case ErrorCode::CoefficientOverflow: return "CoefficientOverflow";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::ChartFailure: return "ChartFailure";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::PartialReport: return "PartialReport";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace toricspec
