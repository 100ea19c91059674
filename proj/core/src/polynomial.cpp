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

#include "toricspec/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "toricspec/error.hpp"

namespace toricspec {

Jet zero_jet(int n, int order) {
  Jet j;
  j.gradient = Eigen::VectorXd::Zero(n);
  j.hessian = Eigen::MatrixXd::Zero(n, n);
  if (order >= 3) j.third.assign(n, Eigen::MatrixXd::Zero(n, n));
  if (order >= 4) j.fourth.assign(n, Tensor3(n, Eigen::MatrixXd::Zero(n, n)));
  return j;
}

void add_scaled(Jet& acc, const Jet& term, double scale) {
  acc.value += scale * term.value;
  acc.gradient += scale * term.gradient;
  acc.hessian += scale * term.hessian;
  for (std::size_t k = 0; k < acc.third.size() && k < term.third.size(); ++k) acc.third[k] += scale * term.third[k];
  for (std::size_t k = 0; k < acc.fourth.size() && k < term.fourth.size(); ++k)
    for (std::size_t l = 0; l < acc.fourth[k].size(); ++l) acc.fourth[k][l] += scale * term.fourth[k][l];
}

PolynomialFn::PolynomialFn(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (static_cast<int>(t.alpha.size()) != dim_)
      throw Error(ErrorCode::InvalidInput, "monomial exponent has wrong length");
    for (int a : t.alpha)
      if (a < 0) throw Error(ErrorCode::InvalidInput, "negative monomial exponent");
  }
}

PolynomialFn PolynomialFn::half_norm_squared(int dim) {
  std::vector<Term> terms;
  for (int i = 0; i < dim; ++i) {
    Term t{std::vector<int>(dim, 0), 0.5};
    t.alpha[i] = 2;
    terms.push_back(t);
  }
  return PolynomialFn(dim, terms);
}

PolynomialFn PolynomialFn::quadratic(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<Term> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Term t{std::vector<int>(n, 0), i == j ? 0.5 * A(i, i) : 0.5 * (A(i, j) + A(j, i))};
      t.alpha[i] += 1;
      t.alpha[j] += 1;
      if (t.coeff != 0.0) terms.push_back(t);
    }
  }
  return PolynomialFn(n, terms);
}

double PolynomialFn::derivative(const std::vector<int>& beta, const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int i = 0; i < dim_ && v != 0.0; ++i) {
      const int a = t.alpha[i], b = beta[i];
      if (b > a) {
        v = 0.0;
        break;
      }
      for (int f = a; f > a - b; --f) v *= f;
      if (a - b > 0) v *= std::pow(x[i], a - b);
    }
    total += v;
  }
  return total;
}

double PolynomialFn::value(const Eigen::VectorXd& x) const { return derivative(std::vector<int>(dim_, 0), x); }

Jet PolynomialFn::jet(const Eigen::VectorXd& x, int order) const {
  const int n = static_cast<int>(x.size());
  Jet j = zero_jet(n, order);
  if (terms_.empty()) return j;
  std::vector<int> beta(n, 0);
  j.value = derivative(beta, x);
  for (int a = 0; a < n; ++a) {
    ++beta[a];
    j.gradient[a] = derivative(beta, x);
    for (int b = 0; b <= a; ++b) {
      ++beta[b];
      j.hessian(a, b) = j.hessian(b, a) = derivative(beta, x);
      if (order >= 3) {
        for (int c = 0; c <= b; ++c) {
          ++beta[c];
          const double v3 = derivative(beta, x);
          // all permutations of (a,b,c)
          const int idx[3] = {a, b, c};
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              for (int r = 0; r < 3; ++r)
                if (p != q && q != r && p != r) j.third[idx[r]](idx[p], idx[q]) = v3;
          if (order >= 4) {
            for (int d = 0; d <= c; ++d) {
              ++beta[d];
              const double v4 = derivative(beta, x);
              const int id4[4] = {a, b, c, d};
              int perm[4] = {0, 1, 2, 3};
              do {
                j.fourth[id4[perm[2]]][id4[perm[3]]](id4[perm[0]], id4[perm[1]]) = v4;
              } while (std::next_permutation(perm, perm + 4));
              --beta[d];
            }
          }
          --beta[c];
        }
      }
      --beta[b];
    }
    --beta[a];
  }
  return j;
}

PolynomialFn PolynomialFn::scaled(double c) const {
  PolynomialFn out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

PolynomialFn PolynomialFn::operator+(const PolynomialFn& other) const {
  if (terms_.empty()) return other;
  if (other.terms_.empty()) return *this;
  if (other.dim_ != dim_) throw Error(ErrorCode::InvalidInput, "polynomial dimension mismatch");
  PolynomialFn out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

}  // namespace toricspec
