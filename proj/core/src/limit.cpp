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

#include "toricspec/limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "toricspec/eigensolver.hpp"
#include "toricspec/error.hpp"
#include "toricspec/json_io.hpp"
#include "toricspec/linalg.hpp"
#include "toricspec/mesh.hpp"

namespace toricspec {

namespace {

// #{κ ∈ Z≥0^n : 2(κ_1 + … + κ_m) + κ_{m+1} + … + κ_n = N} for N = 0..max_level.
std::vector<long long> composition_counts(int n, int m, int max_level) {
  std::vector<long long> ways(static_cast<std::size_t>(max_level) + 1, 0);
  ways[0] = 1;
  for (int i = 0; i < n; ++i) {
    const int step = i < m ? 2 : 1;
    for (int N = step; N <= max_level; ++N) ways[N] += ways[N - step];
  }
  return ways;
}

std::vector<Eigen::Vector2d> clip(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& normal) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d &p = poly[i], &q = poly[(i + 1) % n];
    const double dp = normal.dot(p), dq = normal.dot(q);
    if (dp >= 0.0) out.push_back(p);
    if ((dp >= 0.0) != (dq >= 0.0) && dp != 0.0 && dq != 0.0) out.push_back(p + dp / (dp - dq) * (q - p));
  }
  // Snap near-apex points and drop duplicates.
  std::vector<Eigen::Vector2d> clean;
  for (auto p : out) {
    if (p.norm() < 1e-12) p.setZero();
    if (clean.empty() || (clean.back() - p).norm() > 1e-12) clean.push_back(p);
  }
  if (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12) clean.pop_back();
  return clean;
}

}  // namespace

ConeModel cone_at(const PotentialSpec& spec, const BSPoint& b) {
  ConeModel cone;
  cone.bs_point = b;
  try {
    cone.chart = local_chart(spec.polytope, b.point);
  } catch (const Error& e) {
    throw Error(ErrorCode::ChartFailure, e.what());
  }
  const int n = spec.dim();
  cone.codim = cone.chart.local_codim;
  const Eigen::MatrixXd Linv = cone.chart.inverse_matrix();
  const Eigen::MatrixXd H = spec.psi.jet(to_eigen(b.point), 2).hessian;
  Eigen::MatrixXd A0 = Linv.transpose() * H * Linv;
  A0 = 0.5 * (A0 + A0.transpose());
  if (!linalg::is_positive_definite(A0)) throw Error(ErrorCode::ChartFailure, "Hess psi is not positive definite at b");
  cone.A0 = A0;
  cone.sqrt_A0 = linalg::spd_sqrt(A0);
  const Eigen::MatrixXd inv_sqrt = linalg::spd_inv_sqrt(A0);
  cone.facet_normals.resize(cone.codim, n);
  for (int i = 0; i < cone.codim; ++i) cone.facet_normals.row(i) = inv_sqrt.col(i).normalized().transpose();
  return cone;
}

bool is_separable(const ConeModel& cone) {
  for (int i = 0; i < cone.codim; ++i)
    for (int j = i + 1; j < cone.codim; ++j)
      if (std::abs(cone.facet_normals.row(i).dot(cone.facet_normals.row(j))) > 1e-12) return false;
  return true;
}

double wedge_angle(const ConeModel& cone) {
  if (cone.A0.rows() != 2 || cone.codim != 2) throw Error(ErrorCode::InvalidInput, "not a planar wedge");
  const double c = std::clamp(cone.facet_normals.row(0).dot(cone.facet_normals.row(1)), -1.0, 1.0);
  return std::numbers::pi - std::acos(c);
}

std::vector<double> LimitSpectrum::expanded(std::size_t count) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size() && out.size() < count; ++i)
    for (int r = 0; r < multiplicities[i] && out.size() < count; ++r) out.push_back(values[i]);
  return out;
}

nlohmann::json LimitSpectrum::to_json() const {
  nlohmann::json j;
  j["b"] = rational_vector_to_json(b);
  j["k"] = k;
  j["exact"] = exact;
  j["eigenvalues"] = values;
  j["multiplicities"] = multiplicities;
  if (!exact) j["radius"] = radius;
  return j;
}

LimitSpectrum exact_cone_spectrum(const ConeModel& cone, int k, int max_level) {
  if (!is_separable(cone)) throw Error(ErrorCode::NotSeparable, "cone facets are not orthogonal");
  if (k < 1 || max_level < 0) throw Error(ErrorCode::InvalidInput, "level and max_level must be positive");
  const auto ways = composition_counts(static_cast<int>(cone.A0.rows()), cone.codim, max_level);
  LimitSpectrum out;
  out.b = cone.bs_point.point;
  out.k = k;
  out.exact = true;
  for (int N = 0; N <= max_level; ++N) {
    if (ways[N] == 0) continue;
    out.values.push_back(static_cast<double>(k) * N);
    out.multiplicities.push_back(static_cast<int>(ways[N]));
  }
  return out;
}

std::vector<double> wedge_spectrum(double angle, int k, int count) {
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw Error(ErrorCode::InvalidInput, "wedge angle must lie in (0, pi)");
  std::vector<double> v;
  for (int j = 0; j <= count; ++j)
    for (int p = 0; p <= count; ++p) v.push_back(k * (j * std::numbers::pi / angle + 2.0 * p));
  std::sort(v.begin(), v.end());
  v.resize(static_cast<std::size_t>(count));
  return v;
}

LimitSpectrum numeric_cone_spectrum(const ConeModel& cone, int k, int count, const ConeSolveOptions& options) {
  const int n = static_cast<int>(cone.A0.rows());
  if (n > 2) throw Error(ErrorCode::DimensionUnsupported, "numeric cone spectra exist for n <= 2 only");
  if (k < 1 || count < 1) throw Error(ErrorCode::InvalidInput, "level and count must be positive");
  const double R = options.radius > 0.0 ? options.radius : std::sqrt(30.0 / k);

  Mesh mesh;
  if (n == 1) {
    double a = -R, b = R;
    if (cone.codim == 1) (cone.facet_normals(0, 0) > 0.0 ? a : b) = 0.0;
    mesh = build_interval_mesh(a, b, R / options.cells_per_radius, 1.0);
  } else {
    std::vector<Eigen::Vector2d> poly{{-R, -R}, {R, -R}, {R, R}, {-R, R}};
    for (int i = 0; i < cone.codim; ++i) poly = clip(poly, cone.facet_normals.row(i).transpose());
    mesh = build_polygon_mesh(poly, R / options.cells_per_radius_2d, 1.0);
  }

  const QuadratureRule& rule = interior_rule(n);
  const int nv = mesh.vertices_per_cell();
  std::vector<Eigen::Triplet<double>> kt, mt;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Eigen::MatrixXd grad = mesh.basis_gradients(c);
    const double area = mesh.cell_measure(c);
    double wsum = 0.0;
    Eigen::MatrixXd Me = Eigen::MatrixXd::Zero(nv, nv);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::VectorXd& bary = rule.barycentric[q];
      const double w = rule.weights[q] * area * std::exp(-k * mesh.point(c, bary).squaredNorm());
      wsum += w;
      Me += w * bary * bary.transpose();
    }
    const Eigen::MatrixXd Ke = wsum * grad.transpose() * grad;
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) {
        const double kij = i <= j ? Ke(i, j) : Ke(j, i), mij = i <= j ? Me(i, j) : Me(j, i);
        kt.emplace_back(mesh.cells[c][i], mesh.cells[c][j], kij);
        mt.emplace_back(mesh.cells[c][i], mesh.cells[c][j], mij);
      }
  }
  SparseMatrix K(mesh.node_count(), mesh.node_count()), M(mesh.node_count(), mesh.node_count());
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());

  EigenOptions opt;
  opt.shift = -1.0;
  const EigenPairs pairs = lowest_eigenpairs(K, M, count, opt);

  LimitSpectrum out;
  out.b = cone.bs_point.point;
  out.k = k;
  out.exact = false;
  out.radius = R;
  for (Eigen::Index j = 0; j < pairs.values.size(); ++j) {
    out.values.push_back(0.5 * pairs.values[j]);
    out.multiplicities.push_back(1);
  }
  if (std::abs(out.values.front()) > 1e-6)
    throw Error(ErrorCode::TruncationTooSmall, "lowest cone eigenvalue " + std::to_string(out.values.front()));
  return out;
}

Eigen::VectorXd rescale_to_limit(const LocalChart& chart, const Eigen::MatrixXd& A0, double s, const Eigen::VectorXd& x) {
  return linalg::spd_sqrt(A0) * chart.apply(x) / std::sqrt(s);
}

Eigen::VectorXd rescale_from_limit(const LocalChart& chart, const Eigen::MatrixXd& A0, double s,
                                   const Eigen::VectorXd& xi) {
  return chart.inverse(Eigen::VectorXd(linalg::spd_inv_sqrt(A0) * xi * std::sqrt(s)));
}

std::vector<std::pair<BSPoint, LimitSpectrum>> predicted_limit(const PotentialSpec& spec, int k, int count,
                                                               const ConeSolveOptions& options) {
  std::vector<std::pair<BSPoint, LimitSpectrum>> out;
  for (const auto& b : bs_points(spec.polytope, k)) {
    const ConeModel cone = cone_at(spec, b);
    if (is_separable(cone)) {
      int level = count;
      LimitSpectrum sp = exact_cone_spectrum(cone, k, level);
      while (sp.expanded().size() < static_cast<std::size_t>(count)) sp = exact_cone_spectrum(cone, k, level *= 2);
      out.emplace_back(b, std::move(sp));
    } else {
      out.emplace_back(b, numeric_cone_spectrum(cone, k, count, options));
    }
  }
  return out;
}

}  // namespace toricspec
