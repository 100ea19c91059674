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

#include "toricspec/reduced_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toricspec/error.hpp"

namespace toricspec {

namespace {

constexpr double kOverflow = 1e14;

Eigen::VectorXd mode_vector(const IntVector& mode) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(mode.size()));
  for (std::size_t i = 0; i < mode.size(); ++i) m[static_cast<Eigen::Index>(i)] = static_cast<double>(mode[i]);
  return m;
}

SparseMatrix from_triplets(int n, const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  SparseMatrix At = A.transpose();
  SparseMatrix S = 0.5 * (A + At);
  S.makeCompressed();
  return S;
}

}  // namespace

ReducedCoefficients reduced_coefficients(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                                         const Eigen::VectorXd& x) {
  const Eigen::MatrixXd G = spec.at(s).hessian(x);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "G_s is not positive definite");
  const Eigen::VectorXd d = mode_vector(mode) - k * x;
  ReducedCoefficients c;
  c.diffusion = llt.solve(Eigen::MatrixXd::Identity(G.rows(), G.cols()));
  c.potential = d.dot(G * d) + static_cast<double>(k) * k;
  return c;
}

int QuadratureField::points_per_cell() const { return static_cast<int>(interior_rule(mesh->dim).weights.size()); }

QuadratureField quadrature_field(const PotentialSpec& spec, double s, std::shared_ptr<const Mesh> mesh) {
  if (mesh->dim != spec.dim()) throw Error(ErrorCode::InvalidInput, "mesh and polytope dimensions differ");
  const SymplecticPotential u = spec.at(s);
  const QuadratureRule& rule = interior_rule(mesh->dim);
  const int nq = static_cast<int>(rule.weights.size());
  const int nv = mesh->vertices_per_cell();

  QuadratureField f;
  f.mesh = mesh;
  f.s = s;
  f.points.reserve(static_cast<std::size_t>(mesh->cell_count()) * nq);
  std::vector<Eigen::Triplet<double>> mass;
  mass.reserve(static_cast<std::size_t>(mesh->cell_count()) * nv * nv);
  for (int c = 0; c < mesh->cell_count(); ++c) {
    const double area = mesh->cell_measure(c);
    if (!(area > 0.0)) throw Error(ErrorCode::NotPositiveDefiniteMass, "degenerate cell " + std::to_string(c));
    Eigen::MatrixXd Me = Eigen::MatrixXd::Zero(nv, nv);
    for (int q = 0; q < nq; ++q) {
      const Eigen::VectorXd& b = rule.barycentric[q];
      const Eigen::VectorXd x = mesh->point(c, b);
      const double w = rule.weights[q] * area;
      Eigen::MatrixXd G = u.hessian(x);
      Eigen::LLT<Eigen::MatrixXd> llt(G);
      if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "G_s is not positive definite");
      f.G_inv.push_back(llt.solve(Eigen::MatrixXd::Identity(G.rows(), G.cols())));
      f.G.push_back(std::move(G));
      f.points.push_back(x);
      f.weights.push_back(w);
      for (int i = 0; i < nv; ++i)
        for (int j = i; j < nv; ++j) Me(i, j) += w * b[i] * b[j];
    }
    for (int i = 0; i < nv; ++i)
      for (int j = i; j < nv; ++j) {
        mass.emplace_back(mesh->cells[c][i], mesh->cells[c][j], Me(i, j));
        if (i != j) mass.emplace_back(mesh->cells[c][j], mesh->cells[c][i], Me(i, j));
      }
  }
  f.mass = from_triplets(mesh->node_count(), mass);
  return f;
}

ReducedOperator assemble(const QuadratureField& field, int k, const IntVector& mode) {
  const Mesh& mesh = *field.mesh;
  if (k < 1) throw Error(ErrorCode::InvalidInput, "level must be positive");
  if (static_cast<int>(mode.size()) != mesh.dim) throw Error(ErrorCode::InvalidInput, "mode has wrong length");
  const QuadratureRule& rule = interior_rule(mesh.dim);
  const int nq = static_cast<int>(rule.weights.size());
  const int nv = mesh.vertices_per_cell();
  const Eigen::VectorXd m = mode_vector(mode);
  const double k2 = static_cast<double>(k) * k;

  std::vector<Eigen::Triplet<double>> stiff;
  stiff.reserve(static_cast<std::size_t>(mesh.cell_count()) * nv * nv);
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Eigen::MatrixXd grad = mesh.basis_gradients(c);
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(nv, nv);
    for (int q = 0; q < nq; ++q) {
      const std::size_t idx = static_cast<std::size_t>(c) * nq + q;
      const Eigen::VectorXd d = m - k * field.points[idx];
      const double V = d.dot(field.G[idx] * d) + k2;
      if (!(V <= kOverflow))
        throw Error(ErrorCode::CoefficientOverflow, "potential exceeds 1e14 in cell " + std::to_string(c));
      const double w = field.weights[idx];
      const Eigen::VectorXd& b = rule.barycentric[q];
      const Eigen::MatrixXd flux = field.G_inv[idx] * grad;
      for (int i = 0; i < nv; ++i)
        for (int j = i; j < nv; ++j) Ke(i, j) += w * (grad.col(i).dot(flux.col(j)) + V * b[i] * b[j]);
    }
    for (int i = 0; i < nv; ++i)
      for (int j = i; j < nv; ++j) {
        stiff.emplace_back(mesh.cells[c][i], mesh.cells[c][j], Ke(i, j));
        if (i != j) stiff.emplace_back(mesh.cells[c][j], mesh.cells[c][i], Ke(i, j));
      }
  }
  ReducedOperator op;
  op.s = field.s;
  op.k = k;
  op.mode = mode;
  op.mesh = field.mesh;
  op.K = from_triplets(mesh.node_count(), stiff);
  op.M = field.mass;
  return op;
}

ReducedOperator assemble(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                         std::shared_ptr<const Mesh> mesh) {
  return assemble(quadrature_field(spec, s, std::move(mesh)), k, mode);
}

Spectrum solve_eigs(const ReducedOperator& op, int count, EigenOptions options) {
  if (count < 1 || count > op.dofs()) throw Error(ErrorCode::InvalidInput, "eigenvalue count out of range");
  // Holomorphic sectors sit at k² + kn; the form itself is bounded below by k² M.
  const double k = op.k;
  EigenPairs pairs;
  try {
    options.shift = k * k + k * op.mesh->dim - 1.0;
    pairs = lowest_eigenpairs(op.K, op.M, count, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConvergenceFailure) throw;
    options.shift = k * k - 1.0;
    pairs = lowest_eigenpairs(op.K, op.M, count, options);
  }
  Spectrum out;
  out.eigenvalues = std::move(pairs.values);
  out.residuals = std::move(pairs.residuals);
  out.vectors = std::move(pairs.vectors);
  return out;
}

nlohmann::json DbarSpectrum::to_json() const {
  nlohmann::json j;
  j["s"] = s;
  j["k"] = k;
  j["mode"] = mode;
  j["dbar_eigenvalues"] = std::vector<double>(dbar_eigenvalues.data(), dbar_eigenvalues.data() + dbar_eigenvalues.size());
  j["residuals"] = std::vector<double>(residuals.data(), residuals.data() + residuals.size());
  j["dofs"] = dofs;
  j["h"] = h;
  return j;
}

DbarSpectrum dbar_spectrum(const ReducedOperator& op, int count, EigenOptions options) {
  Spectrum sp = solve_eigs(op, count, options);
  const double k = op.k;
  const double shift = k * k + k * op.mesh->dim;
  DbarSpectrum out;
  out.s = op.s;
  out.k = op.k;
  out.mode = op.mode;
  out.dofs = op.dofs();
  out.h = op.mesh->target_h;
  out.mesh = op.mesh;
  out.dbar_eigenvalues = (sp.eigenvalues.array() - shift) / 2.0;
  for (Eigen::Index j = 0; j < out.dbar_eigenvalues.size(); ++j) {
    double& v = out.dbar_eigenvalues[j];
    if (v < -1e-6) throw Error(ErrorCode::NegativeEigenvalue, "dbar eigenvalue " + std::to_string(v) + " below -1e-6");
    v = std::max(v, 0.0);
  }
  out.residuals = std::move(sp.residuals);
  out.vectors = std::move(sp.vectors);
  return out;
}

DbarSpectrum dbar_spectrum(const QuadratureField& field, int k, const IntVector& mode, int count) {
  return dbar_spectrum(assemble(field, k, mode), count);
}

std::vector<IntVector> mode_set(const DelzantPolytope& P, int k, int margin) {
  if (margin < 0) throw Error(ErrorCode::InvalidInput, "margin must be nonnegative");
  IntVector lo, hi;
  P.lattice_box(k, lo, hi);
  // lattice_box rounds inward; the bounding box of kP has integer corners for Delzant P.
  std::vector<IntVector> out;
  const int n = P.dim();
  IntVector z(n);
  for (int i = 0; i < n; ++i) z[i] = lo[i] - margin;
  while (true) {
    out.push_back(z);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (z[i] < hi[i] + margin) {
        ++z[i];
        break;
      }
      z[i] = lo[i] - margin;
    }
    if (i < 0) break;
  }
  return out;
}

bool is_bs_mode(const DelzantPolytope& P, int k, const IntVector& mode) {
  for (const auto& f : P.facets()) {
    Integer acc = 0;
    for (std::size_t i = 0; i < mode.size(); ++i) acc += f.normal[i] * mode[i];
    if (acc < k * f.offset) return false;
  }
  return true;
}

double rayleigh_quotient(const ReducedOperator& op, const Eigen::VectorXd& nodal) {
  return nodal.dot(op.K * nodal) / nodal.dot(op.M * nodal);
}

Eigen::VectorXd interpolate_ground_state(const PotentialSpec& spec, double s, int k, const IntVector& mode,
                                         const Mesh& mesh) {
  const GroundState g = ground_state(spec, s, k, mode);
  std::vector<double> logs(static_cast<std::size_t>(mesh.node_count()));
  std::vector<bool> zero(logs.size(), false);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Eigen::VectorXd x = mesh.nodes.row(i).transpose();
    if (g.potential().min_slack(x) <= 0.0) {
      // On a facet the value is either 0 (vanishing factor) or the continuous limit.
      if (g.value_or_zero(x) == 0.0) {
        zero[i] = true;
        continue;
      }
    }
    logs[i] = g.log_value(x);
    top = std::max(top, logs[i]);
  }
  Eigen::VectorXd out(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) out[i] = zero[i] ? 0.0 : std::exp(logs[i] - top);
  return out;
}

}  // namespace toricspec
