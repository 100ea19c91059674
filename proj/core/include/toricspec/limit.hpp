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

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "toricspec/potential.hpp"

namespace toricspec {

// Tangent cone at a lattice point, in the flat coordinates ξ = A0^{1/2} y of its chart y.
struct ConeModel {
  BSPoint bs_point;
  LocalChart chart;
  int codim = 0;
  Eigen::MatrixXd A0;            // Hess ψ(b) in chart coordinates
  Eigen::MatrixXd sqrt_A0;
  Eigen::MatrixXd facet_normals;  // unit inward normals in ξ, one row per active facet
};

ConeModel cone_at(const PotentialSpec& spec, const BSPoint& b);

// Pairwise orthogonal facets (or at most one facet).
bool is_separable(const ConeModel& cone);

// Opening angle of a two-facet cone in the plane.
double wedge_angle(const ConeModel& cone);

struct LimitSpectrum {
  RationalVector b;
  int k = 1;
  bool exact = false;
  std::vector<double> values;  // distinct, ascending
  std::vector<int> multiplicities;
  double radius = 0.0;         // truncation radius of the numeric solve, 0 if exact

  // Values repeated by multiplicity, at most `count` of them.
  std::vector<double> expanded(std::size_t count = static_cast<std::size_t>(-1)) const;
  nlohmann::json to_json() const;
};

// Eigenvalues k·N, N = 0..max_level, of ½ of the Gaussian oscillator with Neumann condition.
LimitSpectrum exact_cone_spectrum(const ConeModel& cone, int k, int max_level);
// Independent closed form for planar cones with two facets: k(jπ/α + 2p).
std::vector<double> wedge_spectrum(double angle, int k, int count);

struct ConeSolveOptions {
  double radius = 0.0;       // 0 picks sqrt(30/k)
  int cells_per_radius = 400;  // 1D; 2D uses cells_per_radius_2d
  int cells_per_radius_2d = 90;
};

// P1 elements on the cone cut off at |ξ_i| <= R, weight e^{-k|ξ|²} in both forms, natural BC.
LimitSpectrum numeric_cone_spectrum(const ConeModel& cone, int k, int count, const ConeSolveOptions& options = {});

Eigen::VectorXd rescale_to_limit(const LocalChart& chart, const Eigen::MatrixXd& A0, double s, const Eigen::VectorXd& x);
Eigen::VectorXd rescale_from_limit(const LocalChart& chart, const Eigen::MatrixXd& A0, double s,
                                   const Eigen::VectorXd& xi);

// One entry per lattice point of P ∩ (1/k)Z^n in bs_points order; exact where separable.
std::vector<std::pair<BSPoint, LimitSpectrum>> predicted_limit(const PotentialSpec& spec, int k, int count,
                                                               const ConeSolveOptions& options = {});

}  // namespace toricspec
