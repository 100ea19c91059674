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
#include <Eigen/Sparse>

namespace toricspec {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  // Must lie strictly below the wanted eigenvalues; K - shift·M is factorized.
  double shift = 0.0;
  double tolerance = 1e-10;  // relative residual target
  int dense_threshold = 300;
  int max_basis = 160;
  int max_restarts = 60;
  unsigned seed = 20240613u;
};

struct EigenPairs {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // M-orthonormal columns
  Eigen::VectorXd residuals;  // ‖Kv - λMv‖ / ‖Mv‖
};

// Lowest `count` eigenpairs of K v = λ M v, K symmetric, M SPD.
EigenPairs lowest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count,
                             const EigenOptions& options = {});

Eigen::VectorXd relative_residuals(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& values,
                                   const Eigen::MatrixXd& vectors);

}  // namespace toricspec
