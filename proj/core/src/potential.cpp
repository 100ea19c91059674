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

#include "toricspec/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "toricspec/error.hpp"
#include "toricspec/linalg.hpp"

namespace toricspec {

namespace {

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

Eigen::MatrixXd chart_congruence(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Minv) {
  // Hessian of f(M^{-1}(y - c)) in y.
  return Minv.transpose() * H * Minv;
}

}  // namespace

SymplecticPotential::SymplecticPotential(Eigen::MatrixXd normals, Eigen::VectorXd offsets, double barrier_weight,
                                         PolynomialFn poly)
    : normals_(std::move(normals)), offsets_(std::move(offsets)), weight_(barrier_weight), poly_(std::move(poly)) {}

double SymplecticPotential::min_slack(const Eigen::VectorXd& x) const {
  return normals_.rows() == 0 ? std::numeric_limits<double>::infinity() : slacks(x).minCoeff();
}

void SymplecticPotential::require_interior(const Eigen::VectorXd& x) const {
  if (weight_ != 0.0 && min_slack(x) <= kBoundaryTolerance)
    throw Error(ErrorCode::BoundaryPoint, "point " + describe(x) + " is not interior");
}

Jet SymplecticPotential::jet(const Eigen::VectorXd& x, int order) const {
  require_interior(x);
  const int n = dim();
  Jet j = poly_.jet(x, order);
  if (weight_ == 0.0) return j;
  const Eigen::VectorXd l = slacks(x);
  for (Eigen::Index r = 0; r < normals_.rows(); ++r) {
    const Eigen::VectorXd nu = normals_.row(r).transpose();
    const double lr = l[r], w = weight_;
    j.value += w * lr * std::log(lr);
    j.gradient += w * (1.0 + std::log(lr)) * nu;
    j.hessian += (w / lr) * nu * nu.transpose();
    if (order >= 3) {
      const double c3 = -w / (lr * lr);
      for (int k = 0; k < n; ++k) j.third[k] += c3 * nu[k] * nu * nu.transpose();
    }
    if (order >= 4) {
      const double c4 = 2.0 * w / (lr * lr * lr);
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) j.fourth[k][m] += c4 * nu[k] * nu[m] * nu * nu.transpose();
    }
  }
  return j;
}

double SymplecticPotential::value(const Eigen::VectorXd& x) const { return jet(x, 0).value; }

Eigen::VectorXd SymplecticPotential::gradient(const Eigen::VectorXd& x) const { return jet(x, 1).gradient; }

Eigen::MatrixXd SymplecticPotential::hessian(const Eigen::VectorXd& x) const {
  require_interior(x);
  Eigen::MatrixXd H = poly_.empty() ? Eigen::MatrixXd::Zero(dim(), dim()) : poly_.jet(x, 2).hessian;
  if (weight_ == 0.0) return H;
  const Eigen::VectorXd l = slacks(x);
  for (Eigen::Index r = 0; r < normals_.rows(); ++r) {
    const auto nu = normals_.row(r);
    H.noalias() += (weight_ / l[r]) * nu.transpose() * nu;
  }
  return H;
}

PotentialSpec PotentialSpec::standard(const DelzantPolytope& P) {
  return PotentialSpec{P, PolynomialFn(P.dim()), PolynomialFn::half_norm_squared(P.dim()), 1.0};
}

SymplecticPotential PotentialSpec::at(double s) const {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidInput, "s must be positive");
  return SymplecticPotential(polytope.normal_matrix(), polytope.offset_vector(), guillemin_scale,
                             phi + psi.scaled(1.0 / s));
}

SymplecticPotential PotentialSpec::guillemin_plus_phi() const {
  return SymplecticPotential(polytope.normal_matrix(), polytope.offset_vector(), guillemin_scale, phi);
}

Jet guillemin_derivatives(const DelzantPolytope& P, const Eigen::VectorXd& x, int order) {
  SymplecticPotential v(P.normal_matrix(), P.offset_vector(), 1.0, PolynomialFn(P.dim()));
  return v.jet(x, order);
}

HessianData family_hessian(const PotentialSpec& spec, double s, const Eigen::VectorXd& x) {
  const SymplecticPotential u = spec.at(s);
  Jet j = u.jet(x, 3);
  HessianData h;
  h.x = x;
  h.s = s;
  h.G = j.hessian;
  if (!linalg::is_positive_definite(h.G))
    throw Error(ErrorCode::NotPositiveDefinite, "G_s is not positive definite at " + describe(x));
  Eigen::LLT<Eigen::MatrixXd> llt(h.G);
  h.G_inv = llt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
  const Eigen::MatrixXd L = llt.matrixL();
  h.log_det_G = 2.0 * L.diagonal().array().log().sum();
  h.det_G = std::exp(h.log_det_G);
  h.dG = std::move(j.third);
  return h;
}

BoundaryDecomposition boundary_decomposition(const PotentialSpec& spec, double s, const LocalChart& chart,
                                             const Eigen::VectorXd& y) {
  const int n = spec.dim();
  if (static_cast<int>(chart.lattice_map.size()) != n || y.size() != n)
    throw Error(ErrorCode::ChartMismatch, "chart dimension differs from the polytope");
  if (!spec.polytope.contains(chart.base))
    throw Error(ErrorCode::ChartMismatch, "chart base point is not in the polytope");
  for (int i = 0; i < chart.local_codim; ++i)
    if (!(y[i] > 0.0)) throw Error(ErrorCode::ChartMismatch, "active chart coordinate must be positive");

  const Eigen::VectorXd x = chart.inverse(y);
  const Eigen::MatrixXd Minv = chart.inverse_matrix();
  const Eigen::MatrixXd G = chart_congruence(spec.at(s).hessian(x), Minv);

  BoundaryDecomposition d;
  d.x_part = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < chart.local_codim; ++i) d.x_part(i, i) = 0.5 / y[i];
  d.A = chart_congruence(spec.psi.jet(x, 2).hessian, Minv);
  d.B = G - d.x_part - d.A / s;
  return d;
}

double GroundState::log_value(const Eigen::VectorXd& x) const {
  // (m - kx)·∇u + k u with u = w Σ ℓ log ℓ + p, regrouped so that each facet contributes
  // w (a_r log ℓ_r + <ν_r, m - kx>) with a_r = <ν_r, m> - kλ_r >= 0.
  const double k = k_;
  const Eigen::VectorXd d = mode_ - k * x;
  const Jet pj = u_.polynomial().jet(x, 1);
  double acc = d.dot(pj.gradient) + k * pj.value;
  const Eigen::VectorXd l = u_.slacks(x);
  for (Eigen::Index r = 0; r < u_.normals().rows(); ++r) {
    const double a = u_.normals().row(r).dot(mode_) - k * u_.offsets()[r];
    acc += u_.barrier_weight() * u_.normals().row(r).dot(d);
    if (a != 0.0) acc += u_.barrier_weight() * a * std::log(l[r]);
  }
  return acc;
}

double GroundState::value(const Eigen::VectorXd& x) const {
  if (u_.min_slack(x) <= kBoundaryTolerance)
    throw Error(ErrorCode::BoundaryPoint, "ground state evaluated on the boundary");
  return std::exp(log_value(x));
}

double GroundState::value_or_zero(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd l = u_.slacks(x);
  for (Eigen::Index r = 0; r < l.size(); ++r) {
    const double a = u_.normals().row(r).dot(mode_) - k_ * u_.offsets()[r];
    if (l[r] <= 0.0 && a != 0.0) return 0.0;
  }
  return std::exp(log_value(x));
}

GroundState ground_state(const PotentialSpec& spec, double s, int k, const IntVector& mode) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "level must be positive");
  if (static_cast<int>(mode.size()) != spec.dim()) throw Error(ErrorCode::InvalidInput, "mode has wrong length");
  RationalVector b(mode.size());
  for (std::size_t i = 0; i < mode.size(); ++i) b[i] = Rational(mode[i], k);
  if (!spec.polytope.contains(b)) throw Error(ErrorCode::ModeOutsidePolytope, "m/k lies outside P");
  return GroundState(spec.at(s), k, to_eigen(mode));
}

void check_admissible(const PotentialSpec& spec, int samples_per_axis) {
  const auto& P = spec.polytope;
  const Eigen::VectorXd c = P.centroid();
  const SymplecticPotential base = spec.guillemin_plus_phi();

  std::vector<Eigen::VectorXd> targets;
  for (const auto& v : P.vertices()) targets.push_back(to_eigen(v));
  for (const auto& f : vertices_and_faces(P)) targets.push_back(to_eigen(f.point));

  auto fail = [](const std::string& what, const Eigen::VectorXd& x) {
    throw Error(ErrorCode::NotPositiveDefinite, what + " at " + describe(x));
  };

  for (const auto& t : targets) {
    for (int i = 0; i <= samples_per_axis; ++i) {
      const double frac = static_cast<double>(i) / samples_per_axis;
      const Eigen::VectorXd x = c + frac * (t - c);
      if (!linalg::is_positive_definite(spec.psi.jet(x, 2).hessian)) fail("Hess psi not positive definite", x);
    }
    // Graded approach to the boundary for the Guillemin part.
    for (double gap : {0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-6}) {
      const Eigen::VectorXd x = t + gap * (c - t);
      if (base.min_slack(x) <= kBoundaryTolerance) continue;
      const Eigen::MatrixXd H = base.hessian(x);
      if (!linalg::is_positive_definite(H, 0.0)) fail("Hess(v + phi) not positive definite", x);
      const Eigen::VectorXd l = base.slacks(x);
      double log_prod = std::log(H.determinant());
      for (Eigen::Index r = 0; r < l.size(); ++r) log_prod += std::log(l[r]);
      if (!std::isfinite(log_prod)) fail("det Hess(v + phi) * prod(l) is not positive", x);
    }
  }
}

}  // namespace toricspec
