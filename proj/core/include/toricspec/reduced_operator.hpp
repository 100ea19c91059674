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

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "toricspec/eigensolver.hpp"
#include "toricspec/mesh.hpp"
#include "toricspec/potential.hpp"

namespace toricspec {

struct ReducedCoefficients {
  Eigen::MatrixXd diffusion;  // G_s^{-1}
  double potential = 0.0;     // (m - kx)ᵀ G_s (m - kx) + k²
};

ReducedCoefficients reduced_coefficients(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                                         const Eigen::VectorXd& x);

// Metric data at every quadrature point of a mesh. Independent of k and m, so one instance
// serves all modes of a sweep at fixed s.
struct QuadratureField {
  std::shared_ptr<const Mesh> mesh;
  double s = 0.0;
  std::vector<Eigen::VectorXd> points;  // cell-major, interior_rule(dim).weights.size() per cell
  std::vector<double> weights;          // rule weight × cell measure
  std::vector<Eigen::MatrixXd> G;
  std::vector<Eigen::MatrixXd> G_inv;
  SparseMatrix mass;

  int points_per_cell() const;
};

QuadratureField quadrature_field(const PotentialSpec& spec, double s, std::shared_ptr<const Mesh> mesh);

struct ReducedOperator {
  double s = 0.0;
  int k = 1;
  IntVector mode;
  std::shared_ptr<const Mesh> mesh;
  SparseMatrix K;
  SparseMatrix M;

  int dofs() const { return static_cast<int>(K.rows()); }
};

// P1 stiffness of ∫ ∇φᵀ G⁻¹ ∇φ + V φ² and the L² mass; both exactly symmetric.
ReducedOperator assemble(const QuadratureField& field, int k, const IntVector& mode);
ReducedOperator assemble(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                         std::shared_ptr<const Mesh> mesh);

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::VectorXd residuals;
  Eigen::MatrixXd vectors;      // M-orthonormal nodal values
};

Spectrum solve_eigs(const ReducedOperator& op, int count, EigenOptions options = {});

struct DbarSpectrum {
  double s = 0.0;
  int k = 1;
  IntVector mode;
  Eigen::VectorXd dbar_eigenvalues;
  Eigen::VectorXd residuals;
  int dofs = 0;
  double h = 0.0;
  Eigen::MatrixXd vectors;  // not serialized
  std::shared_ptr<const Mesh> mesh;

  nlohmann::json to_json() const;
};

// (λ - k² - kn)/2 for the lowest `count` eigenvalues; NegativeEigenvalue below -1e-6.
DbarSpectrum dbar_spectrum(const ReducedOperator& op, int count, EigenOptions options = {});
DbarSpectrum dbar_spectrum(const QuadratureField& field, int k, const IntVector& mode, int count);

// Integer vectors in the lattice box of kP, inflated by `margin`, lexicographic.
std::vector<IntVector> mode_set(const DelzantPolytope& P, int k, int margin);
bool is_bs_mode(const DelzantPolytope& P, int k, const IntVector& mode);

// φᵀKφ / φᵀMφ.
double rayleigh_quotient(const ReducedOperator& op, const Eigen::VectorXd& nodal);
// Nodal samples of the exact ground state, scaled so the largest is 1.
Eigen::VectorXd interpolate_ground_state(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                                         const Mesh& mesh);

}  // namespace toricspec
