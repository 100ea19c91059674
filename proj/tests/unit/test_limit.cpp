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
#include <fstream>
#include <memory>
#include <numbers>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "toricspec/error.hpp"
#include "toricspec/limit.hpp"
#include "toricspec/reduced_operator.hpp"

using namespace toricspec;
using namespace toricspec::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

BSPoint find_point(const DelzantPolytope& P, Integer k, const RationalVector& x) {
  for (const auto& b : bs_points(P, k))
    if (b.point == x) return b;
  FAIL("lattice point missing");
  return {};
}

PotentialSpec simplex_with(const MatrixXd& A) {
  PotentialSpec spec = PotentialSpec::standard(simplex());
  spec.psi = PolynomialFn::quadratic(A);
  return spec;
}

// #{κ ∈ Z≥0^n : 2(κ_1+…+κ_m) + κ_{m+1}+…+κ_n = N} by enumeration.
int compositions(int n, int m, int N) {
  if (n == 0) return N == 0;
  int total = 0;
  const int w = m > 0 ? 2 : 1;
  for (int c = 0; c * w <= N; ++c) total += compositions(n - 1, std::max(0, m - 1), N - c * w);
  return total;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double rel) {
  REQUIRE(got.size() >= want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= rel * std::max(1.0, want[i]));
}

}  // namespace

TEST_SUITE("limit") {
  TEST_CASE("cones of the segment and the simplex") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const ConeModel v = cone_at(cp1, find_point(cp1.polytope, 1, {Rational(0)}));
    CHECK(v.codim == 1);
    CHECK(v.A0(0, 0) == doctest::Approx(1.0));
    const ConeModel mid = cone_at(cp1, find_point(cp1.polytope, 2, {Rational(1, 2)}));
    CHECK(mid.codim == 0);
    CHECK(is_separable(mid));

    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const ConeModel o = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(0), Rational(0)}));
    CHECK(o.codim == 2);
    CHECK(is_separable(o));
    CHECK(wedge_angle(o) == doctest::Approx(std::numbers::pi / 2));
    // The other two vertices see the normals (−1,−1) and a coordinate axis: 45 degrees.
    const ConeModel w = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(1), Rational(0)}));
    CHECK_FALSE(is_separable(w));
    CHECK(wedge_angle(w) == doctest::Approx(std::numbers::pi / 4));

    const ConeModel n = cone_at(simplex_with((MatrixXd(2, 2) << 2, 1, 1, 2).finished()),
                                find_point(simplex(), 1, {Rational(0), Rational(0)}));
    CHECK_FALSE(is_separable(n));
    CHECK(wedge_angle(n) == doctest::Approx(std::numbers::pi / 3));
    for (int r = 0; r < n.facet_normals.rows(); ++r) CHECK(n.facet_normals.row(r).norm() == doctest::Approx(1.0));
  }

  TEST_CASE("exact spectra and the composition count") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const ConeModel v = cone_at(cp1, find_point(cp1.polytope, 1, {Rational(0)}));
    check_close(exact_cone_spectrum(v, 1, 6).expanded(3), {0, 2, 4}, 0.0);
    const ConeModel mid = cone_at(cp1, find_point(cp1.polytope, 2, {Rational(1, 2)}));
    check_close(exact_cone_spectrum(mid, 1, 6).expanded(3), {0, 1, 2}, 0.0);

    // Half-plane in the simplex: edge midpoint at k = 2.
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const ConeModel e = cone_at(cp2, find_point(cp2.polytope, 2, {Rational(1, 2), Rational(0)}));
    REQUIRE(e.codim == 1);
    const LimitSpectrum ls = exact_cone_spectrum(e, 1, 8);
    CHECK(ls.exact);
    for (std::size_t i = 0; i < ls.values.size(); ++i)
      CHECK(ls.multiplicities[i] == compositions(2, 1, static_cast<int>(std::lround(ls.values[i]))));
    CHECK(ls.multiplicities[2] == 2);

    // Sum rule against a brute-force count of tuples with weight at most N_max.
    const ConeModel o = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(0), Rational(0)}));
    for (int nmax : {3, 6, 9}) {
      const LimitSpectrum s = exact_cone_spectrum(o, 1, nmax);
      int sum = 0, brute = 0;
      for (int m : s.multiplicities) sum += m;
      for (int a = 0; 2 * a <= nmax; ++a)
        for (int b = 0; 2 * a + 2 * b <= nmax; ++b) ++brute;
      CHECK(sum == brute);
    }
    const ConeModel w = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(1), Rational(0)}));
    CHECK_THROWS_AS(exact_cone_spectrum(w, 1, 4), Error);
  }

  TEST_CASE("numeric spectra agree with the exact ones on separable cones") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    for (int k : {1, 2}) {
      const ConeModel v = cone_at(cp1, find_point(cp1.polytope, 1, {Rational(0)}));
      check_close(numeric_cone_spectrum(v, k, 6).expanded(6), exact_cone_spectrum(v, k, 12).expanded(6), 0.01);
      const ConeModel mid = cone_at(cp1, find_point(cp1.polytope, 2, {Rational(1, 2)}));
      check_close(numeric_cone_spectrum(mid, k, 6).expanded(6), exact_cone_spectrum(mid, k, 12).expanded(6), 0.01);
    }
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const ConeModel o = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(0), Rational(0)}));
    check_close(numeric_cone_spectrum(o, 1, 6).expanded(6), exact_cone_spectrum(o, 1, 12).expanded(6), 0.01);
    // Full plane: interior lattice point of the doubled simplex.
    const PotentialSpec big = PotentialSpec::standard(simplex(3));
    const ConeModel plane = cone_at(big, find_point(big.polytope, 1, {Rational(1), Rational(1)}));
    REQUIRE(plane.codim == 0);
    const std::vector<double> want{0, 1, 1, 2, 2, 2};
    check_close(exact_cone_spectrum(plane, 1, 6).expanded(6), want, 0.0);
    check_close(numeric_cone_spectrum(plane, 1, 6).expanded(6), want, 0.02);
  }

  TEST_CASE("planar wedges follow the closed form") {
    CHECK(wedge_spectrum(std::numbers::pi / 2, 1, 6) == std::vector<double>{0, 2, 2, 4, 4, 4});
    const std::vector<double> sixty = wedge_spectrum(std::numbers::pi / 3, 1, 7);
    check_close(sixty, {0, 2, 3, 4, 5, 6, 6}, 1e-12);
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const ConeModel w = cone_at(cp2, find_point(cp2.polytope, 1, {Rational(1), Rational(0)}));
    check_close(numeric_cone_spectrum(w, 1, 4).expanded(4), wedge_spectrum(std::numbers::pi / 4, 1, 4), 0.01);
  }

  TEST_CASE("non-separable golden cone") {
    std::ifstream in(std::string(TORICSPEC_GOLDEN_DIR) + "/cone_A21_k1.json");
    REQUIRE(in.good());
    const auto golden = nlohmann::json::parse(in);
    const std::vector<double> want = golden["eigenvalues"].get<std::vector<double>>();
    const MatrixXd A = (MatrixXd(2, 2) << 2, 1, 1, 2).finished();
    const ConeModel c = cone_at(simplex_with(A), find_point(simplex(), 1, {Rational(0), Rational(0)}));
    const LimitSpectrum coarse = numeric_cone_spectrum(c, 1, 7);
    CHECK_FALSE(coarse.exact);
    const std::vector<double> got = coarse.expanded(7);
    CHECK(std::abs(got[0]) < 1e-6);
    CHECK(got[1] - got[0] > 0.1);
    for (std::size_t i = 1; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    check_close(got, wedge_spectrum(std::numbers::pi / 3, 1, 7), 0.01);

    ConeSolveOptions fine;
    fine.cells_per_radius_2d = 2 * golden["cells_per_radius_2d"].get<int>();
    check_close(numeric_cone_spectrum(c, 1, 7, fine).expanded(7), want, 0.01);
  }

  TEST_CASE("rescaling dictionary") {
    const PotentialSpec cp2 = PotentialSpec::standard(simplex());
    const BSPoint o = find_point(cp2.polytope, 1, {Rational(0), Rational(0)});
    const ConeModel c = cone_at(cp2, o);
    CHECK(rescale_to_limit(c.chart, c.A0, 0.01, VectorXd::Zero(2)).norm() == 0.0);
    const VectorXd xi = rescale_to_limit(c.chart, c.A0, 0.01, (VectorXd(2) << 0.1, 0.0).finished());
    CHECK((xi - (VectorXd(2) << 1.0, 0.0).finished()).norm() < 1e-12);
    const BSPoint v = find_point(cp2.polytope, 1, {Rational(1), Rational(0)});
    const ConeModel cv = cone_at(cp2, v);
    const VectorXd x = (VectorXd(2) << 0.8, 0.1).finished();
    CHECK((rescale_from_limit(cv.chart, cv.A0, 0.05, rescale_to_limit(cv.chart, cv.A0, 0.05, x)) - x).norm() < 1e-12);
  }

  TEST_CASE("rescaled ground states keep their mass near the apex") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const BSPoint b = find_point(cp1.polytope, 1, {Rational(0)});
    const ConeModel c = cone_at(cp1, b);
    for (double s : {0.05, 0.02}) {
      const auto mesh = std::make_shared<const Mesh>(build_mesh(cp1.polytope, 1.0 / 800.0));
      const DbarSpectrum d = dbar_spectrum(assemble(cp1, s, 1, {0}, mesh), 1);
      const VectorXd& u = d.vectors.col(0);
      double inside = 0.0, total = 0.0;
      for (int e = 0; e < mesh->cell_count(); ++e) {
        const double w = mesh->cell_measure(e);
        const int a = mesh->cells[e][0], z = mesh->cells[e][1];
        const double mass = w * (u[a] * u[a] + u[a] * u[z] + u[z] * u[z]) / 3.0;
        const VectorXd mid = 0.5 * (mesh->nodes.row(a) + mesh->nodes.row(z)).transpose();
        total += mass;
        if (rescale_to_limit(c.chart, c.A0, s, mid).norm() <= 3.0) inside += mass;
      }
      CHECK(inside / total >= 0.99);
    }
  }

  TEST_CASE("predicted limits") {
    const PotentialSpec cp1 = PotentialSpec::standard(segment());
    const auto k1 = predicted_limit(cp1, 1, 3);
    REQUIRE(k1.size() == 2);
    for (const auto& [b, ls] : k1) {
      CHECK(ls.exact);
      check_close(ls.expanded(3), {0, 2, 4}, 0.0);
    }
    const auto k2 = predicted_limit(cp1, 2, 3);
    REQUIRE(k2.size() == 3);
    check_close(k2[0].second.expanded(3), {0, 4, 8}, 0.0);
    check_close(k2[1].second.expanded(3), {0, 2, 4}, 0.0);
    check_close(k2[2].second.expanded(3), {0, 4, 8}, 0.0);

    const auto j = k2[1].second.to_json();
    CHECK(j["b"] == nlohmann::json::array({"1/2"}));
    for (const char* key : {"k", "exact", "eigenvalues", "multiplicities"}) CHECK(j.contains(key));
  }

  TEST_CASE("cone spectra do not depend on the chart") {
    const IntMatrix L{{1, 1}, {0, 1}};
    Eigen::Matrix2d Linv;
    Linv << 1, -1, 0, 1;
    const MatrixXd A = (MatrixXd(2, 2) << 2, 1, 1, 2).finished();
    const PotentialSpec sp = simplex_with(A);
    PotentialSpec sq = PotentialSpec::standard(simplex().transformed(L, {Rational(0), Rational(0)}));
    sq.psi = PolynomialFn::quadratic(Linv.transpose() * A * Linv);
    const auto a = cone_at(sp, find_point(sp.polytope, 1, {Rational(0), Rational(0)}));
    const auto b = cone_at(sq, find_point(sq.polytope, 1, {Rational(0), Rational(0)}));
    CHECK(wedge_angle(a) == doctest::Approx(wedge_angle(b)).epsilon(1e-12));
    const auto ea = numeric_cone_spectrum(a, 1, 4).expanded(4), eb = numeric_cone_spectrum(b, 1, 4).expanded(4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ea[i] - eb[i]) <= 1e-6 * (1 + ea[i]));
  }
}
