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

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "toricspec/polytope.hpp"

namespace toricspec {

struct QuadratureRule {
  std::vector<Eigen::VectorXd> barycentric;  // dim+1 coordinates each
  std::vector<double> weights;               // sum to 1 (scaled by cell measure)
};

// 3-point Gauss on segments, 6-point degree-4 rule on triangles.
const QuadratureRule& interior_rule(int dim);

struct Mesh {
  int dim = 1;
  Eigen::MatrixXd nodes;                  // one row per node
  std::vector<std::array<int, 3>> cells;  // 1D cells use the first two entries
  double target_h = 0.0;
  double grading = 1.0;

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int vertices_per_cell() const { return dim + 1; }

  double cell_measure(int c) const;
  // Columns are the constant gradients of the barycentric basis functions.
  Eigen::MatrixXd basis_gradients(int c) const;
  Eigen::VectorXd point(int c, const Eigen::VectorXd& bary) const;
  double longest_edge(int c) const;
  // longest edge² / (2 · area), 1 for segments.
  double shape_ratio(int c) const;
  double max_shape_ratio() const;
  double min_cell_size() const;

  Mesh transformed(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) const;
};

Mesh build_mesh(const DelzantPolytope& P, double target_h, double grading_ratio = 0.7);
Mesh build_interval_mesh(double a, double b, double target_h, double grading_ratio = 0.7);
// Convex polygon, vertices in any order. Dyadic meshes subdivide the fan 2^j times.
Mesh build_polygon_mesh(const std::vector<Eigen::Vector2d>& vertices, double target_h, double grading_ratio = 0.7,
                        bool dyadic = false);

}  // namespace toricspec
