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

#include <vector>

#include <Eigen/Dense>

#include "toricspec/polynomial.hpp"
#include "toricspec/polytope.hpp"

namespace toricspec {

// Points closer than this to a facet count as boundary points.
inline constexpr double kBoundaryTolerance = 1e-14;

// u(x) = w Σ_r ℓ_r log ℓ_r + p(x), ℓ_r = <ν_r, x> - λ_r.
class SymplecticPotential {
 public:
  SymplecticPotential(Eigen::MatrixXd normals, Eigen::VectorXd offsets, double barrier_weight, PolynomialFn poly);

  int dim() const { return static_cast<int>(normals_.cols()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  double barrier_weight() const { return weight_; }
  const PolynomialFn& polynomial() const { return poly_; }

  Eigen::VectorXd slacks(const Eigen::VectorXd& x) const { return normals_ * x - offsets_; }
  double min_slack(const Eigen::VectorXd& x) const;

  // Throws BoundaryPoint when some ℓ_r <= kBoundaryTolerance.
  Jet jet(const Eigen::VectorXd& x, int order) const;
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

 private:
  void require_interior(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
  double weight_;
  PolynomialFn poly_;
};

struct PotentialSpec {
  DelzantPolytope polytope;
  PolynomialFn phi;
  PolynomialFn psi;
  // Weight of Σ ℓ log ℓ; 1 matches the canonical potential, ½ gives the smooth boundary split.
  double guillemin_scale = 1.0;

  // φ = 0, ψ = ½‖x‖².
  static PotentialSpec standard(const DelzantPolytope& P);

  int dim() const { return polytope.dim(); }
  SymplecticPotential at(double s) const;      // v + φ + ψ/s
  SymplecticPotential guillemin_plus_phi() const;  // v + φ
};

Jet guillemin_derivatives(const DelzantPolytope& P, const Eigen::VectorXd& x, int order);

struct HessianData {
  Eigen::VectorXd x;
  double s = 0.0;
  Eigen::MatrixXd G;
  Eigen::MatrixXd G_inv;
  double det_G = 0.0;
  double log_det_G = 0.0;
  Tensor3 dG;  // dG[k](i,j) = ∂_k G_ij

  double log_det_G_inv() const { return -log_det_G; }
};

HessianData family_hessian(const PotentialSpec& spec, double s, const Eigen::VectorXd& x);

struct BoundaryDecomposition {
  Eigen::MatrixXd x_part;  // ½ diag(1/y_i) on the active block
  Eigen::MatrixXd A;       // Hess ψ in chart coordinates
  Eigen::MatrixXd B;       // remainder
};

// y in chart coordinates; all matrices in chart coordinates.
BoundaryDecomposition boundary_decomposition(const PotentialSpec& spec, double s, const LocalChart& chart,
                                             const Eigen::VectorXd& y);

class GroundState {
 public:
  GroundState(SymplecticPotential u, int k, Eigen::VectorXd mode)
      : u_(std::move(u)), k_(k), mode_(std::move(mode)) {}

  double log_value(const Eigen::VectorXd& x) const;
  double value(const Eigen::VectorXd& x) const;
  // Exact continuation to facets, where the factor ℓ^a vanishes.
  double value_or_zero(const Eigen::VectorXd& x) const;
  const SymplecticPotential& potential() const { return u_; }
  int level() const { return k_; }
  const Eigen::VectorXd& mode() const { return mode_; }

 private:
  SymplecticPotential u_;
  int k_;
  Eigen::VectorXd mode_;
};

// exp((m - kx)·∇u_s + k u_s); throws ModeOutsidePolytope unless m/k ∈ P.
GroundState ground_state(const PotentialSpec& spec, double s, int k, const IntVector& mode);

// Sample-based admissibility check; throws NotPositiveDefinite on the first failing sample.
void check_admissible(const PotentialSpec& spec, int samples_per_axis = 9);

}  // namespace toricspec
