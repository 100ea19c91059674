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
#include <numbers>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "toricspec/error.hpp"
#include "toricspec/polytope.hpp"

using namespace toricspec;
using namespace toricspec::testing;

namespace {

bool has_kind(const DelzantValidation& v, Violation::Kind kind) {
  return std::any_of(v.violations.begin(), v.violations.end(), [&](const Violation& x) { return x.kind == kind; });
}

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

// Scan a padded box and test membership with the rational slack; independent of the lattice-box walk.
std::set<RationalVector> brute_force_points(const DelzantPolytope& P, Integer k) {
  const int n = P.dim();
  IntVector lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Rational mn = P.vertices()[0][i], mx = mn;
    for (const auto& v : P.vertices()) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    lo[i] = static_cast<Integer>(std::floor(to_double(mn * k))) - 2;
    hi[i] = static_cast<Integer>(std::ceil(to_double(mx * k))) + 2;
  }
  std::set<RationalVector> out;
  IntVector z = lo;
  while (true) {
    RationalVector x(n);
    for (int i = 0; i < n; ++i) x[i] = Rational(z[i], k);
    bool inside = true;
    for (int r = 0; r < P.facet_count(); ++r) inside = inside && P.slack(r, x) >= 0;
    if (inside) out.insert(x);
    int i = n - 1;
    while (i >= 0 && z[i] == hi[i]) {
      z[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++z[i];
  }
  return out;
}

}  // namespace

TEST_SUITE("polytope") {
  TEST_CASE("segment and simplex are Delzant") {
    const auto v = validate_delzant(1, {{{1}, 0}, {{-1}, -1}});
    REQUIRE(v.ok());
    CHECK(v.polytope->dim() == 1);
    CHECK(v.polytope->facet_count() == 2);
    CHECK(validate_delzant(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -1}}).ok());
  }

  TEST_CASE("vertex cone of determinant 2 is rejected") {
    // x + 2y >= 0, x <= 2, y <= 1: the vertex (2,-1) has normals (1,2), (-1,0).
    const std::vector<Facet> facets{{{1, 2}, 0}, {{-1, 0}, -2}, {{0, -1}, -1}};
    const auto v = validate_delzant(2, facets);
    CHECK_FALSE(v.ok());
    CHECK(has_kind(v, Violation::Kind::NotDelzant));
    try {
      DelzantPolytope::from_facets(2, facets);
      FAIL("expected NotDelzant");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotDelzant);
    }
  }

  TEST_CASE("each violation class is reported") {
    CHECK(has_kind(validate_delzant(2, {{{1}, 0}, {{0, 1}, 0}, {{-1, -1}, -1}}), Violation::Kind::Malformed));
    CHECK(has_kind(validate_delzant(2, {{{0, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -1}}), Violation::Kind::Malformed));
    CHECK(has_kind(validate_delzant(1, {{{2}, 0}, {{-1}, -1}}), Violation::Kind::NonPrimitiveNormal));
    CHECK(has_kind(validate_delzant(2, {{{1, 0}, 0}, {{0, 1}, 0}}), Violation::Kind::Unbounded));
    CHECK(has_kind(validate_delzant(1, {{{1}, 0}, {{-1}, 1}}), Violation::Kind::EmptyInterior));
    CHECK(has_kind(validate_delzant(1, {{{1}, 0}, {{-1}, 0}}), Violation::Kind::EmptyInterior));
    CHECK(has_kind(validate_delzant(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -1}, {{0, -1}, -1}, {{-1, 0}, -5}}),
                   Violation::Kind::RedundantFacet));
  }

  TEST_CASE("faces of the segment, simplex and Hirzebruch trapezoid") {
    auto count = [](const std::vector<Face>& faces, int codim) {
      return std::count_if(faces.begin(), faces.end(), [&](const Face& f) { return f.codim == codim; });
    };
    const auto seg = vertices_and_faces(segment());
    CHECK(seg.size() == 3);
    CHECK(count(seg, 0) == 1);
    CHECK(count(seg, 1) == 2);

    const auto tri = vertices_and_faces(simplex());
    CHECK(count(tri, 0) == 1);
    CHECK(count(tri, 1) == 3);
    CHECK(count(tri, 2) == 3);

    const auto trap = vertices_and_faces(hirzebruch(2, 1, 1));
    CHECK(count(trap, 1) == 4);
    CHECK(count(trap, 2) == 4);
    for (const auto& f : trap) {
      const DelzantPolytope P = hirzebruch(2, 1, 1);
      CHECK(P.contains(f.point));
      CHECK(P.active_facets(f.point) == f.active);
    }
  }

  TEST_CASE("local charts") {
    const auto c1 = local_chart(segment(), rv({1}));
    CHECK(c1.lattice_map == IntMatrix{{-1}});
    CHECK(c1.shift == rv({1}));
    CHECK(c1.local_codim == 1);

    const DelzantPolytope T = simplex();
    const auto cv = local_chart(T, rv({1, 0}));
    CHECK(cv.local_codim == 2);
    // Active facets become the coordinate half-planes.
    for (std::size_t a = 0; a < cv.active.size(); ++a) {
      for (const auto& v : T.vertices()) {
        const RationalVector y = cv.apply(v);
        CHECK(y[a] == T.slack(cv.active[a], v));
      }
    }

    const auto ce = local_chart(T, rv({Rational(1, 2), 0}));
    CHECK(ce.local_codim == 1);
    for (const auto& c : ce.shift) CHECK((c * 2).denominator() == 1);

    CHECK_THROWS_AS(local_chart(T, rv({1, 1})), Error);
  }

  TEST_CASE("chart round trip on rational samples") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      const DelzantPolytope P = random_delzant(rng);
      for (const auto& b : bs_points(P, 2)) {
        const LocalChart c = local_chart(P, b.point);
        for (const auto& v : P.vertices()) {
          RationalVector x(P.dim());
          for (int i = 0; i < P.dim(); ++i) x[i] = (b.point[i] * 3 + v[i]) / 4;
          CHECK(c.inverse(c.apply(x)) == x);
        }
        CHECK(std::abs(determinant(c.lattice_map)) == 1);
      }
    }
  }

  TEST_CASE("lattice points at level k") {
    const auto k1 = bs_points(segment(), 1);
    REQUIRE(k1.size() == 2);
    for (const auto& b : k1) {
      CHECK(b.strict_level == 1);
      CHECK(b.face_codim == 1);
    }
    const auto k2 = bs_points(segment(), 2);
    REQUIRE(k2.size() == 3);
    CHECK(k2[1].point == rv({Rational(1, 2)}));
    CHECK(k2[1].strict_level == 2);
    CHECK(k2[1].face_codim == 0);
    CHECK(bs_points(simplex(), 2).size() == 6);
    CHECK_THROWS_AS(bs_points(simplex(), 0), Error);
  }

  TEST_CASE("fiber holonomy") {
    const DelzantPolytope T = simplex();
    for (const auto& z : fiber_holonomy(T, rv({Rational(1, 2), 0}), 2)) CHECK(std::abs(z - 1.0) < 1e-15);
    const auto h = fiber_holonomy(T, rv({Rational(1, 3), 0}), 1);
    REQUIRE(h.size() == 2);
    CHECK(std::abs(h[0] - std::polar(1.0, 2.0 * std::numbers::pi / 3.0)) < 1e-14);
    CHECK(std::abs(h[1] - 1.0) < 1e-15);
  }

  TEST_CASE("random lattice points: enumeration, holonomy and level monotonicity") {
    std::mt19937 rng(20240613);
    std::uniform_int_distribution<int> level(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
      const DelzantPolytope P = random_delzant(rng);
      const Integer k = level(rng);
      const auto pts = bs_points(P, k);
      std::set<RationalVector> got;
      for (const auto& b : pts) got.insert(b.point);
      CHECK(got == brute_force_points(P, k));

      // Holonomy is trivial exactly on (1/k)Z^n.
      for (const auto& v : P.vertices()) {
        RationalVector x(P.dim());
        for (int i = 0; i < P.dim(); ++i) x[i] = (v[i] * 2 + P.vertices()[0][i]) / 3;
        bool trivial = true;
        for (const auto& z : fiber_holonomy(P, x, k)) trivial = trivial && std::abs(z - 1.0) < 1e-12;
        CHECK(trivial == (got.count(x) == 1));
      }

      std::set<RationalVector> twice;
      for (const auto& b : bs_points(P, 2 * k)) twice.insert(b.point);
      CHECK(std::includes(twice.begin(), twice.end(), got.begin(), got.end()));
    }
  }

  TEST_CASE("Delzant property is invariant under GL(n,Z) and integral translation") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      const DelzantPolytope P = random_delzant(rng);
      const int n = P.dim();
      RationalVector t(n, Rational(trial % 3 - 1));
      const DelzantPolytope Q = P.transformed(random_unimodular(rng, n), t);
      CHECK(Q.vertices().size() == P.vertices().size());
      CHECK(bs_points(Q, 3).size() == bs_points(P, 3).size());
    }
    // A non-Delzant triangle stays non-Delzant in another frame.
    const std::vector<Facet> bad{{{1, 2}, 0}, {{-1, 0}, -2}, {{0, -1}, -1}};
    const std::vector<Facet> sheared{{{1, 1}, 0}, {{-1, 1}, -2}, {{0, -1}, -1}};  // x -> x + y
    CHECK_FALSE(validate_delzant(2, bad).ok());
    CHECK_FALSE(validate_delzant(2, sheared).ok());
  }

  TEST_CASE("integer matrix helpers") {
    CHECK(determinant({{2, 1}, {1, 1}}) == 1);
    CHECK(determinant({{1, 2, 3}, {0, 1, 4}, {5, 6, 0}}) == 1);
    const IntMatrix A{{2, 1}, {1, 1}};
    const IntMatrix B = unimodular_inverse(A);
    CHECK(B == IntMatrix{{1, -1}, {-1, 2}});
    CHECK_THROWS_AS(unimodular_inverse({{2, 0}, {0, 1}}), Error);
  }

  TEST_CASE("rational text") {
    CHECK(to_string(Rational(-1, 2)) == "-1/2");
    CHECK(to_string(Rational(3)) == "3");
    CHECK(parse_rational("6/4") == Rational(3, 2));
    CHECK(parse_rational(" -7 ") == Rational(-7));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x"), Error);
  }

  TEST_CASE("canonical order") {
    const DelzantPolytope P = DelzantPolytope::from_facets(2, {{{-1, -1}, -1}, {{0, 1}, 0}, {{1, 0}, 0}});
    const auto C = P.canonical();
    CHECK(C.facets()[0].normal == IntVector{-1, -1});
    CHECK(C.facets()[2].normal == IntVector{1, 0});
  }
}
