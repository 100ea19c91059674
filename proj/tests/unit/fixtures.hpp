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

#include <random>
#include <vector>

#include "toricspec/polytope.hpp"
#include "toricspec/potential.hpp"

namespace toricspec::testing {

inline DelzantPolytope segment(Integer a = 0, Integer b = 1) {
  return DelzantPolytope::from_facets(1, {{{1}, a}, {{-1}, -b}});
}

inline DelzantPolytope simplex(Integer scale = 1) {
  return DelzantPolytope::from_facets(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -scale}});
}

inline DelzantPolytope rectangle(Integer a, Integer b) {
  return DelzantPolytope::from_facets(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -a}, {{0, -1}, -b}});
}

// {x >= 0, 0 <= y <= b, x + c y <= a}, Delzant for a > c b.
inline DelzantPolytope hirzebruch(Integer a, Integer b, Integer c) {
  return DelzantPolytope::from_facets(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, -b}, {{-1, -c}, -a}});
}

inline IntMatrix random_unimodular(std::mt19937& rng, int n, int steps = 4) {
  IntMatrix A(n, IntVector(n, 0));
  for (int i = 0; i < n; ++i) A[i][i] = 1;
  if (n == 1) {
    if (rng() % 2) A[0][0] = -1;
    return A;
  }
  std::uniform_int_distribution<int> pick(0, n - 1), coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    const int i = pick(rng);
    int j = pick(rng);
    if (i == j) j = (i + 1) % n;
    const Integer c = coef(rng);
    for (int r = 0; r < n; ++r) A[r][i] += c * A[r][j];  // column operation
    if (rng() % 3 == 0) std::swap(A[0], A[n - 1]);
  }
  return A;
}

// Random Delzant polytope with n <= 2 in a random GL_n(Z) frame.
inline DelzantPolytope random_delzant(std::mt19937& rng) {
  std::uniform_int_distribution<int> kind(0, 3), size(1, 3), shift(-2, 2);
  DelzantPolytope base = segment();
  switch (kind(rng)) {
    case 0: {
      const Integer a = shift(rng);
      base = segment(a, a + size(rng));
      break;
    }
    case 1: base = simplex(size(rng)); break;
    case 2: base = rectangle(size(rng), size(rng)); break;
    default: {
      const Integer b = size(rng) % 2 + 1, c = size(rng) % 2 + 1;
      base = hirzebruch(c * b + size(rng), b, c);
    }
  }
  const int n = base.dim();
  RationalVector t(n);
  for (auto& x : t) x = Rational(shift(rng));
  return base.transformed(random_unimodular(rng, n), t);
}

inline PotentialSpec standard_spec(const DelzantPolytope& P) { return PotentialSpec::standard(P); }

}  // namespace toricspec::testing
