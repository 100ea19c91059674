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

#include "toricspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "toricspec/error.hpp"

namespace toricspec {

namespace {

QuadratureRule make_segment_rule() {
  QuadratureRule q;
  const double a = 0.5 * std::sqrt(3.0 / 5.0);
  for (double t : {0.5 - a, 0.5, 0.5 + a}) q.barycentric.push_back((Eigen::VectorXd(2) << 1.0 - t, t).finished());
  q.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  return q;
}

QuadratureRule make_triangle_rule() {
  QuadratureRule q;
  const double a = 0.445948490915965, wa = 0.223381589678011;
  const double b = 0.091576213509771, wb = 0.109951743655322;
  for (auto [p, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
    const double r = 1.0 - 2.0 * p;
    q.barycentric.push_back((Eigen::VectorXd(3) << p, p, r).finished());
    q.barycentric.push_back((Eigen::VectorXd(3) << p, r, p).finished());
    q.barycentric.push_back((Eigen::VectorXd(3) << r, p, p).finished());
    q.weights.insert(q.weights.end(), {w, w, w});
  }
  return q;
}

Mesh build_interval(double a, double b, double h, double ratio) {
  if (a > b) std::swap(a, b);
  const double L = b - a;

  std::vector<double> layers;  // widths from the end inward
  if (ratio < 1.0) {
    int J = static_cast<int>(std::floor(std::log(1e-3) / std::log(ratio)));
    auto total = [&](int j) {
      double w = 0.0;
      for (int i = 1; i <= j; ++i) w += h * std::pow(ratio, i);
      return w;
    };
    while (J > 0 && 2.0 * total(J) + h > L) --J;
    for (int i = J; i >= 1; --i) layers.push_back(h * std::pow(ratio, i));
  }
  double graded = 0.0;
  for (double w : layers) graded += w;
  const double middle = L - 2.0 * graded;
  const int n_mid = std::max(1, static_cast<int>(std::ceil(middle / h - 1e-9)));

  std::vector<double> xs{a};
  for (double w : layers) xs.push_back(xs.back() + w);
  const double start = xs.back();
  for (int i = 1; i <= n_mid; ++i) xs.push_back(start + middle * i / n_mid);
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) xs.push_back(xs.back() + *it);
  xs.back() = b;

  Mesh m;
  m.dim = 1;
  m.nodes.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m.nodes(static_cast<Eigen::Index>(i), 0) = xs[i];
  for (int i = 0; i + 1 < static_cast<int>(xs.size()); ++i) m.cells.push_back({i, i + 1, -1});
  return m;
}

struct NodeIndex {
  std::map<std::pair<long long, long long>, int> index;
  std::vector<Eigen::Vector2d> coords;

  int get(const Eigen::Vector2d& p) {
    const auto key = std::make_pair(std::llround(p[0] * 1e10), std::llround(p[1] * 1e10));
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(coords.size());
    index.emplace(key, id);
    coords.push_back(p);
    return id;
  }
};

Mesh build_fan(std::vector<Eigen::Vector2d> verts, double h, double ratio, int graded_levels, bool dyadic) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : verts) c += v;
  c /= static_cast<double>(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    return std::atan2(p[1] - c[1], p[0] - c[0]) < std::atan2(q[1] - c[1], q[0] - c[0]);
  });

  double longest = 0.0;
  const int nv = static_cast<int>(verts.size());
  for (int i = 0; i < nv; ++i) {
    const Eigen::Vector2d &p = verts[i], &q = verts[(i + 1) % nv];
    longest = std::max({longest, (p - c).norm(), (q - p).norm()});
  }
  // Uniform refinement halves every edge, so the dyadic subdivision count is a power of two.
  int N = 1;
  if (dyadic)
    while (longest / N > h * (1.0 + 1e-9)) N *= 2;
  else
    N = std::max(1, static_cast<int>(std::ceil(longest / h - 1e-9)));

  // Radial levels in [0, 1]: N base levels with 0..N subdivisions, then equal-count graded levels.
  std::vector<double> t;
  std::vector<int> count;
  const double delta = graded_levels > 0 ? 1.0 / N : 0.0;
  for (int l = 0; l <= N; ++l) {
    t.push_back((1.0 - delta) * l / N);
    count.push_back(l);
  }
  for (int j = 1; j <= graded_levels; ++j) {
    t.push_back(1.0 - delta * std::pow(ratio, j));
    count.push_back(N);
  }
  if (graded_levels > 0) {
    t.push_back(1.0);
    count.push_back(N);
  }

  NodeIndex nodes;
  Mesh m;
  m.dim = 2;
  for (int i = 0; i < nv; ++i) {
    const Eigen::Vector2d e0 = verts[i] - c, e1 = verts[(i + 1) % nv] - c;
    auto at = [&](int level, int j) {
      const double f = count[level] == 0 ? 0.0 : static_cast<double>(j) / count[level];
      return nodes.get(c + t[level] * ((1.0 - f) * e0 + f * e1));
    };
    for (std::size_t l = 0; l + 1 < t.size(); ++l) {
      const int lo = static_cast<int>(l), hi = lo + 1;
      if (count[hi] == count[lo] + 1) {
        for (int j = 0; j <= count[lo]; ++j) m.cells.push_back({at(hi, j), at(hi, j + 1), at(lo, j)});
        for (int j = 0; j < count[lo]; ++j) m.cells.push_back({at(lo, j), at(hi, j + 1), at(lo, j + 1)});
      } else {
        for (int j = 0; j < count[lo]; ++j) {
          m.cells.push_back({at(lo, j), at(hi, j), at(hi, j + 1)});
          m.cells.push_back({at(lo, j), at(hi, j + 1), at(lo, j + 1)});
        }
      }
    }
  }
  m.nodes.resize(static_cast<Eigen::Index>(nodes.coords.size()), 2);
  for (std::size_t i = 0; i < nodes.coords.size(); ++i) m.nodes.row(static_cast<Eigen::Index>(i)) = nodes.coords[i];
  // Orient counterclockwise.
  for (int cidx = 0; cidx < m.cell_count(); ++cidx) {
    auto& cell = m.cells[cidx];
    const Eigen::Vector2d a = m.nodes.row(cell[0]), b = m.nodes.row(cell[1]), d = m.nodes.row(cell[2]);
    const Eigen::Vector2d u = b - a, v = d - a;
    if (u[0] * v[1] - u[1] * v[0] < 0.0) std::swap(cell[1], cell[2]);
  }
  return m;
}

}  // namespace

const QuadratureRule& interior_rule(int dim) {
  static const QuadratureRule segment = make_segment_rule();
  static const QuadratureRule triangle = make_triangle_rule();
  return dim == 1 ? segment : triangle;
}

double Mesh::cell_measure(int c) const {
  const auto& cell = cells[c];
  if (dim == 1) return std::abs(nodes(cell[1], 0) - nodes(cell[0], 0));
  const Eigen::Vector2d a = nodes.row(cell[0]), b = nodes.row(cell[1]), d = nodes.row(cell[2]);
  const Eigen::Vector2d u = b - a, v = d - a;
  return 0.5 * std::abs(u[0] * v[1] - u[1] * v[0]);
}

Eigen::MatrixXd Mesh::basis_gradients(int c) const {
  const auto& cell = cells[c];
  if (dim == 1) {
    const double L = nodes(cell[1], 0) - nodes(cell[0], 0);
    return (Eigen::MatrixXd(1, 2) << -1.0 / L, 1.0 / L).finished();
  }
  Eigen::Matrix2d J;
  J.col(0) = (nodes.row(cell[1]) - nodes.row(cell[0])).transpose();
  J.col(1) = (nodes.row(cell[2]) - nodes.row(cell[0])).transpose();
  const Eigen::Matrix2d JinvT = J.inverse().transpose();
  Eigen::MatrixXd g(2, 3);
  g.col(1) = JinvT.col(0);
  g.col(2) = JinvT.col(1);
  g.col(0) = -g.col(1) - g.col(2);
  return g;
}

Eigen::VectorXd Mesh::point(int c, const Eigen::VectorXd& bary) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i <= dim; ++i) p += bary[i] * nodes.row(cells[c][i]).transpose();
  return p;
}

double Mesh::longest_edge(int c) const {
  if (dim == 1) return cell_measure(c);
  double L = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) L = std::max(L, (nodes.row(cells[c][i]) - nodes.row(cells[c][j])).norm());
  return L;
}

double Mesh::shape_ratio(int c) const {
  if (dim == 1) return 1.0;
  const double L = longest_edge(c);
  return L * L / (2.0 * cell_measure(c));
}

double Mesh::max_shape_ratio() const {
  double r = 0.0;
  for (int c = 0; c < cell_count(); ++c) r = std::max(r, shape_ratio(c));
  return r;
}

double Mesh::min_cell_size() const {
  double r = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cell_count(); ++c) r = std::min(r, dim == 1 ? cell_measure(c) : 2.0 * cell_measure(c) / longest_edge(c));
  return r;
}

Mesh Mesh::transformed(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) const {
  Mesh out = *this;
  for (Eigen::Index i = 0; i < nodes.rows(); ++i) out.nodes.row(i) = (A * nodes.row(i).transpose() + c).transpose();
  if (dim == 2 && A.determinant() < 0.0)
    for (auto& cell : out.cells) std::swap(cell[1], cell[2]);
  return out;
}

Mesh build_mesh(const DelzantPolytope& P, double target_h, double grading_ratio) {
  if (P.dim() == 1) {
    Mesh m = build_interval_mesh(to_double(P.vertices().front()[0]), to_double(P.vertices().back()[0]), target_h,
                                 grading_ratio);
    return m;
  }
  if (P.dim() == 2) {
    std::vector<Eigen::Vector2d> verts;
    for (const auto& v : P.vertices()) verts.push_back(to_eigen(v));
    return build_polygon_mesh(verts, target_h, grading_ratio, true);
  }
  throw Error(ErrorCode::DimensionUnsupported, "meshes exist for n <= 2 only");
}

namespace {

void check_mesh_args(double target_h, double grading_ratio) {
  if (!(target_h > 0.0)) throw Error(ErrorCode::InvalidInput, "target_h must be positive");
  if (!(grading_ratio > 0.0 && grading_ratio <= 1.0)) throw Error(ErrorCode::InvalidInput, "grading ratio must lie in (0, 1]");
}

}  // namespace

Mesh build_interval_mesh(double a, double b, double target_h, double grading_ratio) {
  check_mesh_args(target_h, grading_ratio);
  Mesh m = build_interval(a, b, target_h, grading_ratio);
  m.target_h = target_h;
  m.grading = grading_ratio;
  return m;
}

Mesh build_polygon_mesh(const std::vector<Eigen::Vector2d>& vertices, double target_h, double grading_ratio,
                        bool dyadic) {
  check_mesh_args(target_h, grading_ratio);
  if (vertices.size() < 3) throw Error(ErrorCode::InvalidInput, "polygon needs at least three vertices");
  // Deepest edge grading that keeps the triangles shape regular.
  int levels = grading_ratio < 1.0 ? std::max(1, static_cast<int>(std::floor(std::log(0.3) / std::log(grading_ratio)))) : 0;
  Mesh m;
  for (;; --levels) {
    m = build_fan(vertices, target_h, grading_ratio, levels, dyadic);
    if (levels == 0 || m.max_shape_ratio() <= 10.0) break;
  }
  m.target_h = target_h;
  m.grading = grading_ratio;
  return m;
}

}  // namespace toricspec
