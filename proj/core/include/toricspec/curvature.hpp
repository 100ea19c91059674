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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toricspec/potential.hpp"

namespace toricspec {

struct RicciData {
  Eigen::VectorXd x;
  double s = 0.0;
  Eigen::MatrixXd R;    // R_jl = -∂_j (G^{lh} ∂_h log det G^{-1})
  Eigen::MatrixXd T;    // R G
  Eigen::MatrixXd rho;  // G^{-1} R / 4
  double min_ratio = 0.0;  // smallest κ with T v = κ G v
};

RicciData ricci_general(const SymplecticPotential& u, const Eigen::VectorXd& x, double s = 0.0);
RicciData ricci_general(const PotentialSpec& spec, double s, const Eigen::VectorXd& x);

// Kähler relation: the (dx,dx) block of the Riemannian Ricci tensor equals T/2.
inline Eigen::MatrixXd ricci_xx_from_T(const RicciData& r) { return 0.25 * (r.T + r.T.transpose()); }

struct ModelSpec {
  int n = 1;
  int m = 1;
  Eigen::MatrixXd A;  // n×n, positive definite
  Eigen::VectorXd y;  // length m, y_j = s / (2 x_j)
};

// ½ Σ_{j<m} x_j log x_j + ½ xᵀAx / s, whose Hessian is s^{-1}(Y + A).
SymplecticPotential model_potential(const ModelSpec& model, double s);
// x_j = s/(2 y_j) on active axes, 0 elsewhere.
Eigen::VectorXd model_point(const ModelSpec& model, double s);

// Closed-form T for the model via cofactors of Y + A.
Eigen::MatrixXd model_T(const ModelSpec& model, double s);

struct ModelTPrime {
  Eigen::VectorXd diagonal;  // T'_jj
  Eigen::VectorXd ratio;     // (G')^{-1} T' on the diagonal
};

// Diagonal model with A = I: active axes use y, the remaining n - m axes use x_rest.
ModelTPrime model_T_prime(const Eigen::VectorXd& y, const Eigen::VectorXd& x_rest, double s, int n, int m);

// [A]_I = det(A) [A^{-1}]_{I'} with I' the complement; 0-based indices.
bool minor_identity_check(const Eigen::MatrixXd& A, const std::vector<int>& I, double rel_tol = 1e-10);
double principal_minor(const Eigen::MatrixXd& A, const std::vector<int>& I);

struct ScanRow {
  double s = 0.0;
  Eigen::VectorXd x;
  double min_ratio = 0.0;
};

struct ScanSummary {
  std::vector<double> s_values;
  std::vector<double> infimum;  // per s
  std::vector<ScanRow> rows;
  // inf_{s_{i+1}} >= inf_{s_i} - tol * max(1, |inf_{s_i}|) along the list
  bool bounded_below(double tol = 0.1) const;
  // Every step down the s-list lowers the infimum by more than the tolerance.
  bool decreasing_without_bound(double tol = 0.1) const;
  std::string to_csv() const;
  std::string summary_json() const;
};

struct ModelScanRegion {
  double z_min = 1e-3;
  double z_max = 1e3;  // grid top on uncapped axes
  // Per active axis; nullopt lets the grid run to z_max (toward the facet x_j = 0).
  std::vector<std::optional<double>> z_cap;
  int points_per_axis = 41;
  bool allow_codim_two = false;
};

// Grid in z_j = y_j / sqrt(s) on the active axes.
ScanSummary ricci_lower_bound_scan(const ModelSpec& model, const std::vector<double>& s_values,
                                   const ModelScanRegion& region);

struct SpecScanRegion {
  int points_per_axis = 25;
  double exclusion = 1.0;  // drop points within exclusion * sqrt(s) of two facets at once
  bool allow_codim_two = false;
};

ScanSummary ricci_lower_bound_scan(const PotentialSpec& spec, const std::vector<double>& s_values,
                                   const SpecScanRegion& region);

// Ricci tensor of g = dxᵀ G dx + dθᵀ G^{-1} dθ from Christoffel symbols, 4th-order central
// differences in x with step 1e-4·min ℓ. Returns the full 2n×2n tensor.
Eigen::MatrixXd christoffel_ricci_oracle(const SymplecticPotential& u, const Eigen::VectorXd& x);
Eigen::MatrixXd christoffel_ricci_oracle(const PotentialSpec& spec, double s, const Eigen::VectorXd& x);

}  // namespace toricspec
