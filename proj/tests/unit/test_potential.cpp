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
#include <random>

#include "fixtures.hpp"
#include "toricspec/error.hpp"
#include "toricspec/potential.hpp"

using namespace toricspec;
using namespace toricspec::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

PotentialSpec guillemin_only(const DelzantPolytope& P) {
  PotentialSpec spec = PotentialSpec::standard(P);
  spec.psi = PolynomialFn(P.dim());
  return spec;
}

// Small random φ and a dominant random ψ, admissible on the small test polygons.
PotentialSpec random_spec(std::mt19937& rng, const DelzantPolytope& P) {
  std::uniform_real_distribution<double> c(-0.05, 0.05), d(0.5, 2.0);
  const int n = P.dim();
  PotentialSpec spec = PotentialSpec::standard(P);
  std::vector<PolynomialFn::Term> phi;
  std::vector<PolynomialFn::Term> psi;
  if (n == 1) {
    phi = {{{3}, c(rng)}, {{1}, c(rng)}};
    psi = {{{2}, 0.5 * d(rng)}, {{3}, c(rng)}};
  } else {
    phi = {{{2, 1}, c(rng)}, {{1, 0}, c(rng)}, {{0, 3}, c(rng)}};
    psi = {{{2, 0}, 0.5 * d(rng)}, {{0, 2}, 0.5 * d(rng)}, {{1, 1}, c(rng)}, {{3, 0}, c(rng)}};
  }
  spec.phi = PolynomialFn(n, phi);
  spec.psi = PolynomialFn(n, psi);
  return spec;
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("polynomial jets match finite differences") {
    const PolynomialFn p(2, {{{2, 1}, 1.5}, {{0, 3}, -0.5}, {{1, 0}, 2.0}, {{0, 0}, 1.0}});
    const VectorXd x = vec({0.3, -0.7});
    const Jet j = p.jet(x, 4);
    CHECK(j.value == doctest::Approx(1.5 * 0.09 * -0.7 - 0.5 * -0.343 + 0.6 + 1.0));
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
      VectorXd e = VectorXd::Zero(2);
      e[i] = h;
      CHECK(j.gradient[i] == doctest::Approx((p.value(x + e) - p.value(x - e)) / (2 * h)).epsilon(1e-8));
      const Jet jp = p.jet(x + e, 2), jm = p.jet(x - e, 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(j.third[i](a, b) == doctest::Approx((jp.hessian(a, b) - jm.hessian(a, b)) / (2 * h)).epsilon(1e-7));
    }
    CHECK(p.derivative({2, 1}, x) == doctest::Approx(3.0));
    CHECK(p.derivative({0, 3}, x) == doctest::Approx(-3.0));
    CHECK(p.derivative({3, 0}, x) == 0.0);
    CHECK(PolynomialFn::half_norm_squared(2).value(vec({3, 4})) == doctest::Approx(12.5));
  }

  TEST_CASE("Guillemin derivatives on the segment and the simplex") {
    const Jet mid = guillemin_derivatives(segment(), vec({0.5}), 3);
    CHECK(mid.value == doctest::Approx(-std::log(2.0)));
    CHECK(mid.hessian(0, 0) == doctest::Approx(4.0));

    const Jet q = guillemin_derivatives(segment(), vec({0.25}), 3);
    CHECK(q.hessian(0, 0) == doctest::Approx(4.0 + 4.0 / 3.0));
    CHECK(q.third[0](0, 0) == doctest::Approx(-16.0 + 16.0 / 9.0));

    const Jet t = guillemin_derivatives(simplex(), vec({1.0 / 3, 1.0 / 3}), 2);
    CHECK(t.hessian(0, 0) == doctest::Approx(6.0));
    CHECK(t.hessian(0, 1) == doctest::Approx(3.0));
    CHECK(t.hessian(1, 1) == doctest::Approx(6.0));

    CHECK_THROWS_AS(guillemin_derivatives(segment(), vec({0.0}), 2), Error);
  }

  TEST_CASE("family Hessian examples") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    CHECK(family_hessian(cp1, 1.0, vec({0.5})).G(0, 0) == doctest::Approx(5.0));
    CHECK(family_hessian(cp1, 0.1, vec({0.5})).G(0, 0) == doctest::Approx(14.0));
    const HessianData h = family_hessian(PotentialSpec::standard(simplex()), 0.5, vec({1.0 / 3, 1.0 / 3}));
    CHECK(h.G(0, 0) == doctest::Approx(8.0));
    CHECK(h.G(0, 1) == doctest::Approx(3.0));
    CHECK(h.G(1, 1) == doctest::Approx(8.0));
    CHECK(h.det_G == doctest::Approx(55.0));
  }

  TEST_CASE("Hessian data invariants on random specs") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
      const DelzantPolytope P = trial % 2 ? simplex() : rectangle(1, 2);
      const PotentialSpec spec = random_spec(rng, P);
      check_admissible(spec);
      for (double s : {1.0, 0.1, 0.01}) {
        VectorXd x = P.centroid();
        const VectorXd v = to_eigen(P.vertices()[trial % P.vertices().size()]);
        x += u(rng) * (v - x);
        const HessianData h = family_hessian(spec, s, x);
        CHECK((h.G * h.G_inv - MatrixXd::Identity(2, 2)).norm() < 1e-12);
        CHECK((h.G - h.G.transpose()).norm() == 0.0);
        // Totally symmetric third derivatives, and agreement with differences of G.
        const double step = 1e-6;
        for (int k = 0; k < 2; ++k) {
          VectorXd e = VectorXd::Zero(2);
          e[k] = step;
          const MatrixXd fd = (family_hessian(spec, s, x + e).G - family_hessian(spec, s, x - e).G) / (2 * step);
          CHECK((fd - h.dG[k]).norm() <= 1e-6 * (1.0 + h.dG[k].norm()));
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(h.dG[k](i, j) - h.dG[i](k, j)) <= 1e-10 * (1.0 + h.dG[k].norm()));
        }
        // G_s ⪰ Hess ψ / s
        const MatrixXd Hpsi = spec.psi.jet(x, 2).hessian;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eg(h.G), ep(Hpsi);
        CHECK(eg.eigenvalues()[0] >= ep.eigenvalues()[0] / s * (1 - 1e-12));
      }
    }
  }

  TEST_CASE("inverse metric degenerates at rate s") {
    const PotentialSpec spec = PotentialSpec::standard(simplex());
    const VectorXd x = vec({0.2, 0.3});
    // s⁻¹ G_s⁻¹ → (Hess ψ)⁻¹ = I with an O(s) error
    for (double s : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double r = family_hessian(spec, s, x).G_inv.norm() / s;
      CHECK(std::abs(r - std::sqrt(2.0)) <= 20.0 * s);
    }
  }

  TEST_CASE("boundary decomposition reconstructs the Hessian") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const LocalChart c0 = local_chart(segment(), {Rational(0)});
    const BoundaryDecomposition d = boundary_decomposition(cp1, 0.1, c0, vec({0.1}));
    CHECK(d.x_part(0, 0) == doctest::Approx(5.0));
    CHECK(d.A(0, 0) == doctest::Approx(1.0));
    const double G = family_hessian(cp1, 0.1, vec({0.1})).G(0, 0);
    CHECK(std::abs(d.x_part(0, 0) + d.A(0, 0) / 0.1 + d.B(0, 0) - G) <= 1e-12 * G);

    // With the unit weight the remainder grows like 1/(2x); with weight one half it stays bounded.
    PotentialSpec half = cp1;
    half.guillemin_scale = 0.5;
    for (double y : {1e-2, 1e-3, 1e-4}) {
      const BoundaryDecomposition full = boundary_decomposition(cp1, 0.1, c0, vec({y}));
      const BoundaryDecomposition bounded = boundary_decomposition(half, 0.1, c0, vec({y}));
      CHECK(y * full.B(0, 0) == doctest::Approx(0.5).epsilon(2 * y));
      CHECK(std::abs(bounded.B(0, 0)) < 1.0);
    }

    // Vertex chart of the simplex at (1,0), and an interior chart with no singular part.
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const LocalChart cv = local_chart(simplex(), {Rational(1), Rational(0)});
    const VectorXd y = vec({0.05, 0.2});
    const BoundaryDecomposition dv = boundary_decomposition(cp2, 0.3, cv, y);
    const MatrixXd Minv = cv.inverse_matrix();
    const MatrixXd Gy = Minv.transpose() * family_hessian(cp2, 0.3, cv.inverse(y)).G * Minv;
    CHECK((dv.x_part + dv.A / 0.3 + dv.B - Gy).norm() <= 1e-12 * Gy.norm());

    const LocalChart ci = local_chart(simplex(), {Rational(1, 3), Rational(1, 3)});
    const BoundaryDecomposition di = boundary_decomposition(cp2, 0.3, ci, vec({0.01, -0.02}));
    CHECK(di.x_part.norm() == 0.0);
    CHECK_THROWS_AS(boundary_decomposition(cp2, 0.3, cv, vec({-0.1, 0.2})), Error);
  }

  TEST_CASE("ground states of the pure Guillemin potential") {
    const PotentialSpec g = guillemin_only(segment());
    const GroundState m0 = ground_state(g, 1.0, 1, {0});
    const GroundState m1 = ground_state(g, 1.0, 1, {1});
    const double r0 = m0.value(vec({0.5})) / 0.5;
    const double r1 = m1.value(vec({0.5})) / 0.5;
    for (double x : {0.1, 0.3, 0.7, 0.9}) {
      CHECK(m0.value(vec({x})) == doctest::Approx(r0 * (1 - x)).epsilon(1e-12));
      CHECK(m1.value(vec({x})) == doctest::Approx(r1 * x).epsilon(1e-12));
    }
    CHECK(m0.value_or_zero(vec({1.0})) == 0.0);
    CHECK(m0.value_or_zero(vec({0.0})) > 0.0);
    CHECK_THROWS_AS(m0.value(vec({1.0})), Error);
    CHECK_THROWS_AS(ground_state(g, 1.0, 1, {2}), Error);
  }

  TEST_CASE("ground state satisfies the exact eigen-equation") {
    // ∇ log φ = G (m - kx) gives L φ = (k² + kn) φ; checked through the flux φ (m - kx) by differences.
    std::mt19937 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
      const DelzantPolytope P = trial % 2 ? simplex(2) : segment(0, 2);
      const PotentialSpec spec = random_spec(rng, P);
      const int n = P.dim(), k = 1 + trial % 3;
      for (const auto& b : bs_points(P, k)) {
        IntVector m(n);
        for (int i = 0; i < n; ++i) m[i] = (b.point[i] * k).numerator();
        for (double s : {1.0, 0.1}) {
          const GroundState phi = ground_state(spec, s, k, m);
          const VectorXd x = P.centroid() + 0.3 * (to_eigen(b.point) - P.centroid()) + VectorXd::Constant(n, 0.01);
          const HessianData h = family_hessian(spec, s, x);
          const VectorXd d = to_eigen(m) - k * x;
          const VectorXd want = h.G * d;
          const double step = 1e-5;
          VectorXd grad(n);
          double div_flux = 0.0;  // div(G⁻¹∇φ) / φ with G⁻¹∇φ = φ d
          for (int i = 0; i < n; ++i) {
            VectorXd e = VectorXd::Zero(n);
            e[i] = step;
            grad[i] = (phi.log_value(x + e) - phi.log_value(x - e)) / (2 * step);
            const double fp = phi.value(x + e) * (m[i] - k * (x[i] + step));
            const double fm = phi.value(x - e) * (m[i] - k * (x[i] - step));
            div_flux += (fp - fm) / (2 * step) / phi.value(x);
          }
          CHECK((grad - want).norm() <= 1e-7 * (1.0 + want.norm()));
          const double V = d.dot(h.G * d) + k * k;
          const double residual = -div_flux + V - (k * k + k * n);
          CHECK(std::abs(residual) <= 1e-6 * V);
        }
      }
    }
  }

  TEST_CASE("admissibility sampling rejects a bad psi") {
    PotentialSpec spec = PotentialSpec::standard(simplex());
    CHECK_NOTHROW(check_admissible(spec));
    spec.psi = PolynomialFn(2, {{{2, 0}, 0.5}, {{0, 2}, -0.5}});
    CHECK_THROWS_AS(check_admissible(spec), Error);
    PotentialSpec phi_bad = PotentialSpec::standard(segment());
    phi_bad.phi = PolynomialFn(1, {{{2}, -5.0}});
    CHECK_THROWS_AS(check_admissible(phi_bad), Error);
  }
}
