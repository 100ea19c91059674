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

#include <Eigen/Dense>

namespace toricspec::linalg {

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Smallest eigenvalue > rel_tol * largest, the admissibility threshold used throughout.
inline bool is_positive_definite(const Eigen::MatrixXd& S, double rel_tol = 1e-10) {
  const Eigen::VectorXd ev = symmetric_eigenvalues(S);
  return ev.size() == 0 || (ev[ev.size() - 1] > 0.0 && ev[0] > rel_tol * ev[ev.size() - 1]);
}

// Smallest kappa with T v = kappa G v, G SPD, T symmetrized.
inline double generalized_min_eigenvalue(const Eigen::MatrixXd& T, const Eigen::MatrixXd& G) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Ts = 0.5 * (T + T.transpose());
  const Eigen::MatrixXd X = L.triangularView<Eigen::Lower>().solve(Ts);
  const Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(X.transpose());
  return symmetric_eigenvalues(C)[0];
}

inline Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.operatorSqrt();
}

inline Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.operatorInverseSqrt();
}

}  // namespace toricspec::linalg
