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

#include "toricspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SparseCholesky>

#include "toricspec/error.hpp"

namespace toricspec {

namespace {

EigenPairs dense_lowest(const SparseMatrix& K, const SparseMatrix& M, int count) {
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(K), Md = Eigen::MatrixXd(M);
  Eigen::LLT<Eigen::MatrixXd> llt(Md);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::CholeskyFailure, "mass matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "dense generalized eigensolver failed");
  EigenPairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  return out;
}

// M-orthogonalize the columns of W against the first `fixed` columns of V and each other; returns
// the number of surviving columns, appended to V after position `fixed`.
int m_orthogonalize(Eigen::MatrixXd& V, int fixed, Eigen::MatrixXd W, const SparseMatrix& M) {
  int kept = fixed;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    Eigen::VectorXd w = W.col(j);
    const double before = std::sqrt(std::max(0.0, w.dot(M * w)));
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (kept == 0) break;
      const Eigen::VectorXd Mw = M * w;
      const Eigen::VectorXd coeff = V.leftCols(kept).transpose() * Mw;
      w -= V.leftCols(kept) * coeff;
    }
    const double after = std::sqrt(std::max(0.0, w.dot(M * w)));
    if (after < 1e-10 * before) continue;
    V.col(kept++) = w / after;
  }
  return kept;
}

EigenPairs krylov_lowest(const SparseMatrix& K, const SparseMatrix& M, int count, const EigenOptions& opt) {
  const Eigen::Index N = K.rows();
  SparseMatrix shifted = K - opt.shift * M;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "shifted factorization failed");
  if ((solver.vectorD().array() <= 0.0).any())
    throw Error(ErrorCode::ConvergenceFailure, "shift is not below the spectrum");

  const int block = std::min<int>(static_cast<int>(N), count + 2);
  const int basis = std::min<int>({static_cast<int>(N), opt.max_basis, std::max(8 * block, 24)});

  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(N, block);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < N; ++i) X(i, j) = gauss(rng);

  // Residuals cannot drop below roundoff in K v; diagonal Rayleigh quotients bound its scale.
  double pencil_scale = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) pencil_scale = std::max(pencil_scale, std::abs(K.coeff(i, i)) / M.coeff(i, i));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * pencil_scale;

  Eigen::MatrixXd V(N, basis);
  EigenPairs out;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    int size = m_orthogonalize(V, 0, X, M);
    int start = 0;
    while (size < basis) {
      const int width = std::min(size - start, basis - size);
      if (width <= 0) break;
      Eigen::MatrixXd W = solver.solve(M * V.middleCols(start, width));
      const int grown = m_orthogonalize(V, size, std::move(W), M);
      start = size;
      if (grown == size) break;  // invariant subspace
      size = grown;
    }
    if (size < count) throw Error(ErrorCode::ConvergenceFailure, "Krylov basis collapsed");

    const Eigen::MatrixXd Vs = V.leftCols(size);
    Eigen::MatrixXd Kr = Vs.transpose() * (K * Vs);
    Eigen::MatrixXd Mr = Vs.transpose() * (M * Vs);
    Kr = 0.5 * (Kr + Kr.transpose());
    Mr = 0.5 * (Mr + Mr.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kr, Mr);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "projected problem failed");
    const Eigen::MatrixXd ritz = Vs * es.eigenvectors().leftCols(std::min(block, size));

    // One shifted solve per Ritz vector; orthogonalization roundoff would otherwise sit on the
    // rows where K is huge and the eigenvector tiny.
    const Eigen::MatrixXd W = solver.solve(M * ritz.leftCols(count));
    Eigen::MatrixXd Kw = W.transpose() * (K * W), Mw = W.transpose() * (M * W);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (Kw + Kw.transpose()),
                                                                    0.5 * (Mw + Mw.transpose()));
    if (small.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "polishing step failed");
    out.values = small.eigenvalues();
    out.vectors = W * small.eigenvectors();
    out.residuals = relative_residuals(K, M, out.values, out.vectors);
    bool converged = true;
    for (int j = 0; j < count; ++j)
      if (out.residuals[j] > opt.tolerance * std::max(1.0, std::abs(out.values[j])) + floor) converged = false;
    if (converged) return out;
    X = ritz;
  }
  throw Error(ErrorCode::ConvergenceFailure, "block Krylov iteration did not converge");
}

}  // namespace

Eigen::VectorXd relative_residuals(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& values,
                                   const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd r(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const Eigen::VectorXd Mv = M * vectors.col(j);
    r[j] = (K * vectors.col(j) - values[j] * Mv).norm() / Mv.norm();
  }
  return r;
}

EigenPairs lowest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count, const EigenOptions& options) {
  if (K.rows() != K.cols() || M.rows() != K.rows()) throw Error(ErrorCode::InvalidInput, "K and M must be square of equal size");
  if (count < 1 || count > K.rows()) throw Error(ErrorCode::InvalidInput, "eigenpair count out of range");
  EigenPairs out;
  if (K.rows() <= options.dense_threshold || 4 * (count + 4) >= K.rows()) {
    out = dense_lowest(K, M, count);
    out.residuals = relative_residuals(K, M, out.values, out.vectors);
  } else {
    out = krylov_lowest(K, M, count, options);
  }
  return out;
}

}  // namespace toricspec
