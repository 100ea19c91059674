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

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "fixtures.hpp"
#include "toricspec/error.hpp"
#include "toricspec/reduced_operator.hpp"

using namespace toricspec;
using namespace toricspec::testing;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::shared_ptr<const Mesh> mesh_of(const DelzantPolytope& P, double h, double grading = 0.7) {
  return std::make_shared<const Mesh>(build_mesh(P, h, grading));
}

bool is_symmetric(const SparseMatrix& A) { return (SparseMatrix(A.transpose()) - A).norm() == 0.0; }

double lowest_dbar(const PotentialSpec& spec, double s, int k, const IntVector& m, double h) {
  return dbar_spectrum(assemble(spec, s, k, m, mesh_of(spec.polytope, h)), 1).dbar_eigenvalues[0];
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("reduced coefficients") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const ReducedCoefficients c = reduced_coefficients(cp1, 0.1, 1, {0}, vec({0.5}));
    CHECK(c.potential == doctest::Approx(4.5));
    CHECK(c.diffusion(0, 0) == doctest::Approx(1.0 / 14.0));
    CHECK(reduced_coefficients(cp1, 0.1, 2, {1}, vec({0.5})).potential == doctest::Approx(4.0));
    CHECK_THROWS_AS(reduced_coefficients(cp1, 0.1, 1, {0}, vec({1.0})), Error);

    // V ≥ k² + s⁻¹ λ_min(Hess ψ) k² |x - m/k|² on random interior samples.
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    for (int t = 0; t < 200; ++t) {
      VectorXd x = vec({u(rng), u(rng)});
      if (x.sum() >= 0.98) x *= 0.9 / x.sum();
      const int k = 1 + t % 3;
      const IntVector m{static_cast<Integer>(t % 4) - 1, static_cast<Integer>(t % 5) - 2};
      const double s = t % 2 ? 0.1 : 0.01;
      const VectorXd d = x - to_eigen(m) / k;
      CHECK(reduced_coefficients(cp2, s, k, m, x).potential >= k * k * (1.0 + d.squaredNorm() / s) * (1 - 1e-12));
    }
  }

  TEST_CASE("assembled pairs are symmetric and the form is bounded below by k^2") {
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    for (const IntVector& m : {IntVector{0, 0}, IntVector{2, -1}}) {
      const ReducedOperator op = assemble(cp2, 0.2, 1, m, mesh_of(cp2.polytope, 0.1));
      CHECK(is_symmetric(op.K));
      CHECK(is_symmetric(op.M));
      const Spectrum sp = solve_eigs(op, 4);
      CHECK(sp.eigenvalues[0] >= 1.0 - 1e-6);
      CHECK(sp.residuals.maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("lowest eigenvalue at s = 1 approaches k^2 + kn") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    double prev = 1e9;
    for (double h : {0.02, 0.005, 0.00125}) {
      const Spectrum sp = solve_eigs(assemble(cp1, 1.0, 1, {0}, mesh_of(cp1.polytope, h)), 2);
      const double err = std::abs(sp.eigenvalues[0] - 2.0);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("ground-state Rayleigh quotient converges at second order") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    std::vector<double> err;
    for (double h : {0.02, 0.01, 0.005}) {
      const auto mesh = mesh_of(cp1.polytope, h, 1.0);
      const ReducedOperator op = assemble(cp1, 0.5, 1, {0}, mesh);
      err.push_back(rayleigh_quotient(op, interpolate_ground_state(cp1, 0.5, 1, {0}, *mesh)) - 2.0);
    }
    const double rate = std::log2((err[0] - err[1]) / (err[1] - err[2]));
    MESSAGE("Rayleigh quotient rate ", rate);
    CHECK(rate >= 1.7);
    CHECK(rate <= 2.3);
  }

  TEST_CASE("lattice modes of the segment carry zero modes at every s") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    for (double s : {1.0, 0.1, 0.02})
      for (Integer m : {0, 1}) CHECK(std::abs(lowest_dbar(cp1, s, 1, {m}, 1.0 / 400.0)) < 1e-4);
  }

  TEST_CASE("mode outside kP has a gap growing as s shrinks") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    double prev = 0.0;
    for (double s : {1.0, 0.3, 0.1, 0.03}) {
      const double g = lowest_dbar(cp1, s, 1, {2}, 1.0 / 400.0);
      CHECK(g > prev);
      prev = g;
    }
  }

  TEST_CASE("zero-mode count equals the lattice count") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    for (int k : {1, 2, 3}) {
      int zeros = 0;
      for (const IntVector& m : mode_set(cp1.polytope, k, 1)) zeros += std::abs(lowest_dbar(cp1, 0.2, k, m, 1.0 / 400.0)) < 1e-3;
      CHECK(zeros == static_cast<int>(bs_points(cp1.polytope, k).size()));
    }
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    int zeros = 0;
    for (const IntVector& m : mode_set(cp2.polytope, 1, 1)) zeros += std::abs(lowest_dbar(cp2, 0.5, 1, m, 0.05)) < 1e-3;
    CHECK(zeros == 3);
  }

  TEST_CASE("mode sets") {
    CHECK(mode_set(segment(), 2, 0) == std::vector<IntVector>{{0}, {1}, {2}});
    CHECK(mode_set(segment(), 2, 1) == std::vector<IntVector>{{-1}, {0}, {1}, {2}, {3}});
    std::vector<IntVector> bs;
    for (const auto& m : mode_set(simplex(), 1, 0))
      if (is_bs_mode(simplex(), 1, m)) bs.push_back(m);
    std::sort(bs.begin(), bs.end());
    CHECK(bs == std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}});
  }

  TEST_CASE("spectra agree across GL(2,Z) charts") {
    const IntMatrix L{{1, 1}, {0, 1}};
    Eigen::Matrix2d Lm, Linv;
    Lm << 1, 1, 0, 1;
    Linv << 1, -1, 0, 1;
    const PotentialSpec sp = PotentialSpec::standard(simplex());
    PotentialSpec sq = PotentialSpec::standard(simplex().transformed(L, {Rational(0), Rational(0)}));
    sq.psi = PolynomialFn::quadratic(Linv.transpose() * Linv);
    const auto mp = mesh_of(sp.polytope, 0.1);
    const auto mq = std::make_shared<const Mesh>(mp->transformed(Lm, Eigen::Vector2d::Zero()));
    for (const IntVector& m : {IntVector{0, 0}, IntVector{1, 0}, IntVector{-1, 2}}) {
      // m/k lives with x, so the mode moves with the polytope.
      const Eigen::Vector2d mq_real = Lm * to_eigen(m);
      const IntVector m2{static_cast<Integer>(std::lround(mq_real[0])), static_cast<Integer>(std::lround(mq_real[1]))};
      const DbarSpectrum a = dbar_spectrum(assemble(sp, 0.2, 1, m, mp), 4);
      const DbarSpectrum b = dbar_spectrum(assemble(sq, 0.2, 1, m2, mq), 4);
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(a.dbar_eigenvalues[j] - b.dbar_eigenvalues[j]) <= 1e-8 * (1 + std::abs(a.dbar_eigenvalues[j])));
    }
  }

  TEST_CASE("spectrum JSON layout") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const DbarSpectrum d = dbar_spectrum(assemble(cp1, 0.1, 1, {0}, mesh_of(cp1.polytope, 0.01)), 3);
    const auto j = d.to_json();
    for (const char* key : {"s", "k", "mode", "dbar_eigenvalues", "residuals", "dofs", "h"}) CHECK(j.contains(key));
    CHECK(j["dbar_eigenvalues"].size() == 3);
  }
}
