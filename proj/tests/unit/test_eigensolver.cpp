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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "toricspec/eigensolver.hpp"
#include "toricspec/error.hpp"

using namespace toricspec;

namespace {

// P1 Neumann Laplacian on [0,1] with n cells.
std::pair<SparseMatrix, SparseMatrix> neumann(int n) {
  const double h = 1.0 / n;
  std::vector<Eigen::Triplet<double>> k, m;
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        k.emplace_back(c + a, c + b, (a == b ? 1.0 : -1.0) / h);
        m.emplace_back(c + a, c + b, (a == b ? 2.0 : 1.0) * h / 6.0);
      }
  }
  SparseMatrix K(n + 1, n + 1), M(n + 1, n + 1);
  K.setFromTriplets(k.begin(), k.end());
  M.setFromTriplets(m.begin(), m.end());
  return {K, M};
}

}  // namespace

TEST_SUITE("eigensolver") {
  TEST_CASE("identical pencils give unit eigenvalues") {
    const auto [K, M] = neumann(20);
    const EigenPairs e = lowest_eigenpairs(M, M, 5);
    for (int i = 0; i < 5; ++i) CHECK(e.values[i] == doctest::Approx(1.0));
  }

  TEST_CASE("Neumann spectrum on the unit interval") {
    for (int n : {100, 2000}) {
      const auto [K, M] = neumann(n);
      EigenOptions opt;
      opt.shift = -1.0;
      const EigenPairs e = lowest_eigenpairs(K, M, 5, opt);
      REQUIRE(e.values.size() == 5);
      CHECK(std::abs(e.values[0]) < 1e-8);
      for (int j = 1; j < 5; ++j) {
        const double exact = std::pow(std::numbers::pi * j, 2);
        CHECK(e.values[j] == doctest::Approx(exact).epsilon(n > 1000 ? 1e-4 : 1e-2));
        CHECK(e.values[j] > exact);
      }
      for (int j = 0; j < 5; ++j) CHECK(e.residuals[j] <= 1e-7);
      const Eigen::MatrixXd gram = e.vectors.transpose() * (M * e.vectors);
      CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-8);
    }
  }

  TEST_CASE("dense and Krylov paths agree") {
    const auto [K, M] = neumann(250);
    EigenOptions dense, krylov;
    dense.shift = krylov.shift = -1.0;
    krylov.dense_threshold = 10;
    const EigenPairs a = lowest_eigenpairs(K, M, 6, dense), b = lowest_eigenpairs(K, M, 6, krylov);
    for (int j = 0; j < 6; ++j) CHECK(b.values[j] == doctest::Approx(a.values[j]).epsilon(1e-9).scale(1.0));
    const Eigen::VectorXd r = relative_residuals(K, M, b.values, b.vectors);
    CHECK(r.maxCoeff() <= 1e-8);
  }
}
