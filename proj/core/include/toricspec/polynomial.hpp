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

namespace toricspec {

// Third and fourth derivative tensors: d3[k](i,j) = ∂_i∂_j∂_k f, d4[k][l](i,j) = ∂_i∂_j∂_k∂_l f.
using Tensor3 = std::vector<Eigen::MatrixXd>;
using Tensor4 = std::vector<std::vector<Eigen::MatrixXd>>;

struct Jet {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  Tensor3 third;   // filled when order >= 3
  Tensor4 fourth;  // filled when order >= 4
};

Jet zero_jet(int n, int order);
void add_scaled(Jet& acc, const Jet& term, double scale);

class PolynomialFn {
 public:
  struct Term {
    std::vector<int> alpha;
    double coeff = 0.0;
  };

  PolynomialFn() = default;
  explicit PolynomialFn(int dim) : dim_(dim) {}
  PolynomialFn(int dim, std::vector<Term> terms);

  static PolynomialFn half_norm_squared(int dim);  // ½‖x‖²
  static PolynomialFn quadratic(const Eigen::MatrixXd& A);  // ½ xᵀAx

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // ∂^beta f at x.
  double derivative(const std::vector<int>& beta, const Eigen::VectorXd& x) const;
  double value(const Eigen::VectorXd& x) const;
  Jet jet(const Eigen::VectorXd& x, int order) const;

  PolynomialFn scaled(double c) const;
  PolynomialFn operator+(const PolynomialFn& other) const;

 private:
  int dim_ = 0;
  std::vector<Term> terms_;
};

}  // namespace toricspec
