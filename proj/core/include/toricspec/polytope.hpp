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

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "toricspec/rational.hpp"

namespace toricspec {

using IntMatrix = std::vector<IntVector>;  // row-major, square

struct Facet {
  IntVector normal;  // inward normal
  Integer offset = 0;

  bool operator==(const Facet&) const = default;
};

struct Violation {
  enum class Kind { Malformed, NonPrimitiveNormal, Unbounded, EmptyInterior, RedundantFacet, NotDelzant };
  Kind kind;
  int index = -1;  // facet or vertex index when meaningful
  std::string detail;
};

std::string_view to_string(Violation::Kind kind);

struct DelzantValidation;

class DelzantPolytope {
 public:
  // Throws Error carrying every violation when the data is not Delzant.
  static DelzantPolytope from_facets(int dim, const std::vector<Facet>& facets);

  int dim() const { return dim_; }
  int facet_count() const { return static_cast<int>(facets_.size()); }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<RationalVector>& vertices() const { return vertices_; }
  // Facets tight at each vertex, sorted ascending.
  const std::vector<std::vector<int>>& vertex_facets() const { return vertex_facets_; }

  Rational slack(int facet, const RationalVector& x) const;
  double slack(int facet, const Eigen::VectorXd& x) const;
  Eigen::VectorXd slacks(const Eigen::VectorXd& x) const;
  bool contains(const RationalVector& x) const;
  std::vector<int> active_facets(const RationalVector& x) const;

  const Eigen::MatrixXd& normal_matrix() const { return normals_; }  // rows are normals
  const Eigen::VectorXd& offset_vector() const { return offsets_; }
  Eigen::VectorXd centroid() const;  // vertex average
  // Smallest integer box containing scale * P.
  void lattice_box(Integer scale, IntVector& lo, IntVector& hi) const;

  // Image under x -> A x + c, A in GL_n(Z).
  DelzantPolytope transformed(const IntMatrix& A, const RationalVector& c) const;
  // Facets sorted lexicographically by normal, then offset.
  DelzantPolytope canonical() const;

 private:
  friend DelzantValidation validate_delzant(int, const std::vector<Facet>&);
  DelzantPolytope() = default;
  void cache_numeric();

  int dim_ = 0;
  std::vector<Facet> facets_;
  std::vector<RationalVector> vertices_;
  std::vector<std::vector<int>> vertex_facets_;
  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
};

struct DelzantValidation {
  std::optional<DelzantPolytope> polytope;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

DelzantValidation validate_delzant(int dim, const std::vector<Facet>& facets);

struct Face {
  std::vector<int> active;  // sorted facet indices
  int codim = 0;
  RationalVector point;     // relative-interior representative
  std::vector<int> vertices;
};

// Every face of P, sorted by codimension then active set. n <= 3.
std::vector<Face> vertices_and_faces(const DelzantPolytope& P);

struct LocalChart {
  RationalVector base;
  IntMatrix lattice_map;
  RationalVector shift;
  int local_codim = 0;
  std::vector<int> active;  // facet indices, in chart-axis order

  RationalVector apply(const RationalVector& x) const;
  RationalVector inverse(const RationalVector& y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd matrix() const;
  Eigen::MatrixXd inverse_matrix() const;
};

LocalChart local_chart(const DelzantPolytope& P, const RationalVector& b);

struct BSPoint {
  RationalVector point;
  Integer level = 1;
  Integer strict_level = 1;
  int face_codim = 0;

  bool operator==(const BSPoint&) const = default;
};

// P ∩ (1/k)Z^n, lexicographic order.
std::vector<BSPoint> bs_points(const DelzantPolytope& P, Integer k);

std::vector<std::complex<double>> fiber_holonomy(const DelzantPolytope& P, const RationalVector& b,
                                                 Integer k);

// Integer matrix helpers for n <= 3 (also used by tests).
Integer determinant(const IntMatrix& A);
IntMatrix unimodular_inverse(const IntMatrix& A);

}  // namespace toricspec
