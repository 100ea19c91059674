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

#include "toricspec/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "toricspec/error.hpp"

namespace toricspec {

namespace {

using RationalMatrix = std::vector<RationalVector>;

RationalVector to_rational(const IntVector& v) {
  RationalVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

// Row echelon form in place; returns pivot columns.
std::vector<int> row_reduce(RationalMatrix& m, int cols) {
  std::vector<int> pivots;
  int row = 0;
  const int rows = static_cast<int>(m.size());
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int r = row; r < rows; ++r) {
      if (m[r][col] != Rational(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[row], m[pivot]);
    const Rational inv = Rational(1) / m[row][col];
    for (auto& e : m[row]) e *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || m[r][col] == Rational(0)) continue;
      const Rational f = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank_of(RationalMatrix m, int cols) { return static_cast<int>(row_reduce(m, cols).size()); }

std::optional<RationalVector> solve_square(const std::vector<const Facet*>& rows, int n) {
  RationalMatrix aug;
  for (const Facet* f : rows) {
    RationalVector r = to_rational(f->normal);
    r.push_back(Rational(f->offset));
    aug.push_back(std::move(r));
  }
  const auto pivots = row_reduce(aug, n);
  if (static_cast<int>(pivots.size()) < n) return std::nullopt;
  RationalVector x(n);
  for (int i = 0; i < n; ++i) x[i] = aug[i][n];
  return x;
}

// Basis of the kernel of a rank-(n-1) system, n columns.
RationalVector kernel_direction(RationalMatrix m, int n) {
  const auto pivots = row_reduce(m, n);
  int free_col = 0;
  for (int c = 0; c < n; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) {
      free_col = c;
      break;
    }
  }
  RationalVector d(n, Rational(0));
  d[free_col] = 1;
  for (std::size_t r = 0; r < pivots.size(); ++r) d[pivots[r]] = -m[r][free_col];
  return d;
}

void for_each_subset(int d, int size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  if (size > d) return;
  while (true) {
    fn(idx);
    int i = size - 1;
    while (i >= 0 && idx[i] == d - size + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Integer floor_div(const Rational& q) {
  Integer n = q.numerator(), d = q.denominator();
  Integer f = n / d;
  if ((n % d != 0) && (n < 0)) --f;
  return f;
}

Integer ceil_div(const Rational& q) { return -floor_div(-q); }

}  // namespace

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q.numerator();
  if (q.denominator() != 1) os << '/' << q.denominator();
  return os.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "not a rational number: '" + text + "'");
  }
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Malformed: return "Malformed";
    case Violation::Kind::NonPrimitiveNormal: return "NonPrimitiveNormal";
    case Violation::Kind::Unbounded: return "Unbounded";
    case Violation::Kind::EmptyInterior: return "EmptyInterior";
    case Violation::Kind::RedundantFacet: return "RedundantFacet";
    case Violation::Kind::NotDelzant: return "NotDelzant";
  }
  return "Unknown";
}

Integer determinant(const IntMatrix& A) {
  // Bareiss fraction-free elimination.
  const int n = static_cast<int>(A.size());
  if (n == 0) return 1;
  IntMatrix m = A;
  Integer sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int swap_row = -1;
      for (int r = k + 1; r < n; ++r) {
        if (m[r][k] != 0) {
          swap_row = r;
          break;
        }
      }
      if (swap_row < 0) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

IntMatrix unimodular_inverse(const IntMatrix& A) {
  const int n = static_cast<int>(A.size());
  RationalMatrix aug(n);
  for (int i = 0; i < n; ++i) {
    aug[i] = to_rational(A[i]);
    for (int j = 0; j < n; ++j) aug[i].push_back(Rational(i == j ? 1 : 0));
  }
  if (static_cast<int>(row_reduce(aug, n).size()) < n)
    throw Error(ErrorCode::InvalidInput, "lattice map is singular");
  IntMatrix inv(n, IntVector(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Rational& q = aug[i][n + j];
      if (q.denominator() != 1) throw Error(ErrorCode::InvalidInput, "lattice map is not in GL_n(Z)");
      inv[i][j] = q.numerator();
    }
  }
  return inv;
}

DelzantValidation validate_delzant(int n, const std::vector<Facet>& facets) {
  DelzantValidation out;
  auto& bad = out.violations;
  const int d = static_cast<int>(facets.size());

  if (n < 1) bad.push_back({Violation::Kind::Malformed, -1, "dimension must be positive"});
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(facets[r].normal.size()) != n) {
      bad.push_back({Violation::Kind::Malformed, r, "normal has wrong length"});
    } else if (std::all_of(facets[r].normal.begin(), facets[r].normal.end(), [](Integer v) { return v == 0; })) {
      bad.push_back({Violation::Kind::Malformed, r, "zero normal"});
    }
  }
  if (!bad.empty()) return out;

  for (int r = 0; r < d; ++r) {
    Integer g = 0;
    for (Integer v : facets[r].normal) g = std::gcd(g, v < 0 ? -v : v);
    if (g != 1) bad.push_back({Violation::Kind::NonPrimitiveNormal, r, "gcd of normal entries is " + std::to_string(g)});
  }

  // Bounded iff the recession cone {v : <nu_r, v> >= 0} is trivial. Its extreme rays (if any)
  // are kernels of rank-(n-1) subsystems; a line in it shows up as rank deficiency.
  RationalMatrix all_normals;
  for (const auto& f : facets) all_normals.push_back(to_rational(f.normal));
  bool unbounded = rank_of(all_normals, n) < n;
  if (!unbounded) {
    for_each_subset(d, n - 1, [&](const std::vector<int>& S) {
      if (unbounded) return;
      RationalMatrix sub;
      for (int r : S) sub.push_back(all_normals[r]);
      if (rank_of(sub, n) != n - 1) return;
      RationalVector dir = n == 1 ? RationalVector{Rational(1)} : kernel_direction(sub, n);
      for (int sgn : {1, -1}) {
        bool ray = true;
        for (int r = 0; r < d && ray; ++r) ray = Rational(sgn) * dot(facets[r].normal, dir) >= Rational(0);
        if (ray) unbounded = true;
      }
    });
  }
  if (unbounded) {
    bad.push_back({Violation::Kind::Unbounded, -1, "recession cone is nontrivial"});
    return out;
  }

  DelzantPolytope P;
  P.dim_ = n;
  P.facets_ = facets;
  for_each_subset(d, n, [&](const std::vector<int>& S) {
    std::vector<const Facet*> rows;
    for (int r : S) rows.push_back(&facets[r]);
    auto x = solve_square(rows, n);
    if (!x || !P.contains(*x)) return;
    if (std::find(P.vertices_.begin(), P.vertices_.end(), *x) != P.vertices_.end()) return;
    P.vertices_.push_back(*x);
  });
  std::sort(P.vertices_.begin(), P.vertices_.end());
  if (P.vertices_.empty()) {
    bad.push_back({Violation::Kind::EmptyInterior, -1, "polytope is empty"});
    return out;
  }
  for (const auto& v : P.vertices_) P.vertex_facets_.push_back(P.active_facets(v));

  // The vertex average of a polytope lies on an inequality iff that inequality is tight on all of P.
  RationalVector center(n, Rational(0));
  for (const auto& v : P.vertices_)
    for (int i = 0; i < n; ++i) center[i] += v[i];
  for (auto& c : center) c /= static_cast<Integer>(P.vertices_.size());
  if (!P.active_facets(center).empty()) {
    bad.push_back({Violation::Kind::EmptyInterior, -1, "polytope is not full-dimensional"});
    return out;
  }

  for (int r = 0; r < d; ++r) {
    bool duplicate = false;
    for (int q = 0; q < r; ++q) duplicate = duplicate || facets[q] == facets[r];
    RationalMatrix diffs;
    const RationalVector* anchor = nullptr;
    for (std::size_t v = 0; v < P.vertices_.size(); ++v) {
      const auto& act = P.vertex_facets_[v];
      if (!std::binary_search(act.begin(), act.end(), r)) continue;
      if (!anchor) {
        anchor = &P.vertices_[v];
        continue;
      }
      RationalVector diff(n);
      for (int i = 0; i < n; ++i) diff[i] = P.vertices_[v][i] - (*anchor)[i];
      diffs.push_back(diff);
    }
    const int face_dim = anchor ? rank_of(diffs, n) : -1;
    if (duplicate || face_dim != n - 1)
      bad.push_back({Violation::Kind::RedundantFacet, r,
                     duplicate ? "repeats an earlier facet" : "inequality is not tight on an (n-1)-face"});
  }

  for (std::size_t v = 0; v < P.vertices_.size(); ++v) {
    const auto& act = P.vertex_facets_[v];
    if (static_cast<int>(act.size()) != n) {
      bad.push_back({Violation::Kind::NotDelzant, static_cast<int>(v),
                     std::to_string(act.size()) + " facets meet at the vertex"});
      continue;
    }
    IntMatrix cone;
    for (int r : act) cone.push_back(facets[r].normal);
    const Integer det = determinant(cone);
    if (det != 1 && det != -1)
      bad.push_back({Violation::Kind::NotDelzant, static_cast<int>(v),
                     "vertex cone determinant " + std::to_string(det)});
  }

  if (bad.empty()) {
    P.cache_numeric();
    out.polytope = std::move(P);
  }
  return out;
}

DelzantPolytope DelzantPolytope::from_facets(int dim, const std::vector<Facet>& facets) {
  auto result = validate_delzant(dim, facets);
  if (result.ok()) return std::move(*result.polytope);
  std::ostringstream msg;
  for (std::size_t i = 0; i < result.violations.size(); ++i) {
    const auto& v = result.violations[i];
    msg << (i ? "; " : "") << to_string(v.kind);
    if (v.index >= 0) msg << '(' << v.index << ')';
    msg << ' ' << v.detail;
  }
  ErrorCode code = ErrorCode::InvalidInput;
  switch (result.violations.front().kind) {
    case Violation::Kind::Unbounded: code = ErrorCode::Unbounded; break;
    case Violation::Kind::EmptyInterior: code = ErrorCode::EmptyInterior; break;
    case Violation::Kind::RedundantFacet: code = ErrorCode::RedundantFacet; break;
    case Violation::Kind::NotDelzant: code = ErrorCode::NotDelzant; break;
    case Violation::Kind::NonPrimitiveNormal: code = ErrorCode::NonPrimitiveNormal; break;
    case Violation::Kind::Malformed: code = ErrorCode::InvalidInput; break;
  }
  throw Error(code, msg.str());
}

void DelzantPolytope::cache_numeric() {
  normals_.resize(facet_count(), dim_);
  offsets_.resize(facet_count());
  for (int r = 0; r < facet_count(); ++r) {
    for (int i = 0; i < dim_; ++i) normals_(r, i) = static_cast<double>(facets_[r].normal[i]);
    offsets_[r] = static_cast<double>(facets_[r].offset);
  }
}

Rational DelzantPolytope::slack(int facet, const RationalVector& x) const {
  return dot(facets_[facet].normal, x) - Rational(facets_[facet].offset);
}

double DelzantPolytope::slack(int facet, const Eigen::VectorXd& x) const {
  return normals_.row(facet).dot(x) - offsets_[facet];
}

Eigen::VectorXd DelzantPolytope::slacks(const Eigen::VectorXd& x) const { return normals_ * x - offsets_; }

bool DelzantPolytope::contains(const RationalVector& x) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  for (int r = 0; r < facet_count(); ++r)
    if (slack(r, x) < Rational(0)) return false;
  return true;
}

std::vector<int> DelzantPolytope::active_facets(const RationalVector& x) const {
  std::vector<int> act;
  for (int r = 0; r < facet_count(); ++r)
    if (slack(r, x) == Rational(0)) act.push_back(r);
  return act;
}

Eigen::VectorXd DelzantPolytope::centroid() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
  for (const auto& v : vertices_) c += to_eigen(v);
  return c / static_cast<double>(vertices_.size());
}

void DelzantPolytope::lattice_box(Integer scale, IntVector& lo, IntVector& hi) const {
  lo.assign(dim_, 0);
  hi.assign(dim_, 0);
  for (int i = 0; i < dim_; ++i) {
    Rational mn = vertices_.front()[i], mx = mn;
    for (const auto& v : vertices_) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    lo[i] = ceil_div(mn * scale);
    hi[i] = floor_div(mx * scale);
  }
}

DelzantPolytope DelzantPolytope::transformed(const IntMatrix& A, const RationalVector& c) const {
  const IntMatrix Ainv = unimodular_inverse(A);
  std::vector<Facet> out;
  for (const auto& f : facets_) {
    // <nu, x> = <A^{-T} nu, A x>
    Facet g;
    g.normal.assign(dim_, 0);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i) g.normal[j] += Ainv[i][j] * f.normal[i];
    const Rational off = Rational(f.offset) + dot(g.normal, c);
    if (off.denominator() != 1)
      throw Error(ErrorCode::InvalidInput, "translation does not preserve integral offsets");
    g.offset = off.numerator();
    out.push_back(std::move(g));
  }
  return from_facets(dim_, out);
}

DelzantPolytope DelzantPolytope::canonical() const {
  auto sorted = facets_;
  std::sort(sorted.begin(), sorted.end(), [](const Facet& a, const Facet& b) {
    if (a.normal != b.normal) return a.normal < b.normal;
    return a.offset < b.offset;
  });
  return from_facets(dim_, sorted);
}

std::vector<Face> vertices_and_faces(const DelzantPolytope& P) {
  const int n = P.dim();
  if (n > 3) throw Error(ErrorCode::DimensionUnsupported, "face lattice only for n <= 3");
  // Simple polytope: the faces through a vertex are exactly the subsets of its active set.
  std::set<std::vector<int>> sets;
  for (const auto& act : P.vertex_facets()) {
    for (int mask = 0; mask < (1 << act.size()); ++mask) {
      std::vector<int> sub;
      for (std::size_t i = 0; i < act.size(); ++i)
        if (mask & (1 << i)) sub.push_back(act[i]);
      sets.insert(sub);
    }
  }
  std::vector<Face> faces;
  for (const auto& active : sets) {
    Face f;
    f.active = active;
    f.codim = static_cast<int>(active.size());
    f.point.assign(n, Rational(0));
    for (std::size_t v = 0; v < P.vertices().size(); ++v) {
      const auto& act = P.vertex_facets()[v];
      if (!std::includes(act.begin(), act.end(), active.begin(), active.end())) continue;
      f.vertices.push_back(static_cast<int>(v));
      for (int i = 0; i < n; ++i) f.point[i] += P.vertices()[v][i];
    }
    for (auto& c : f.point) c /= static_cast<Integer>(f.vertices.size());
    faces.push_back(std::move(f));
  }
  std::stable_sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
    if (a.codim != b.codim) return a.codim < b.codim;
    return a.active < b.active;
  });
  return faces;
}

RationalVector LocalChart::apply(const RationalVector& x) const {
  RationalVector y = shift;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += dot(lattice_map[i], x);
  return y;
}

RationalVector LocalChart::inverse(const RationalVector& y) const {
  const IntMatrix inv = unimodular_inverse(lattice_map);
  RationalVector d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = y[i] - shift[i];
  RationalVector x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = dot(inv[i], d);
  return x;
}

Eigen::MatrixXd LocalChart::matrix() const {
  const auto n = static_cast<Eigen::Index>(lattice_map.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = static_cast<double>(lattice_map[i][j]);
  return A;
}

Eigen::MatrixXd LocalChart::inverse_matrix() const {
  const IntMatrix inv = unimodular_inverse(lattice_map);
  const auto n = static_cast<Eigen::Index>(inv.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = static_cast<double>(inv[i][j]);
  return A;
}

Eigen::VectorXd LocalChart::apply(const Eigen::VectorXd& x) const { return matrix() * x + to_eigen(shift); }

Eigen::VectorXd LocalChart::inverse(const Eigen::VectorXd& y) const {
  return inverse_matrix() * (y - to_eigen(shift));
}

LocalChart local_chart(const DelzantPolytope& P, const RationalVector& b) {
  if (!P.contains(b)) throw Error(ErrorCode::PointOutside, "chart base point is not in P");
  const int n = P.dim();
  LocalChart chart;
  chart.base = b;
  chart.active = P.active_facets(b);
  chart.local_codim = static_cast<int>(chart.active.size());

  if (chart.active.empty()) {
    chart.lattice_map.assign(n, IntVector(n, 0));
    for (int i = 0; i < n; ++i) chart.lattice_map[i][i] = 1;
  } else {
    // Complete the active normals with the remaining normals of a vertex of the face through b.
    const std::vector<int>* vertex_set = nullptr;
    for (const auto& act : P.vertex_facets()) {
      if (std::includes(act.begin(), act.end(), chart.active.begin(), chart.active.end())) {
        vertex_set = &act;
        break;
      }
    }
    std::vector<int> order = chart.active;
    for (int r : *vertex_set)
      if (!std::binary_search(chart.active.begin(), chart.active.end(), r)) order.push_back(r);
    for (int r : order) chart.lattice_map.push_back(P.facets()[r].normal);
  }
  chart.shift.assign(n, Rational(0));
  for (int i = 0; i < n; ++i) chart.shift[i] = -dot(chart.lattice_map[i], b);
  return chart;
}

std::vector<BSPoint> bs_points(const DelzantPolytope& P, Integer k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "level must be positive");
  const int n = P.dim();
  IntVector lo, hi;
  P.lattice_box(k, lo, hi);
  std::vector<BSPoint> out;
  IntVector z = lo;
  while (true) {
    bool inside = true;
    for (const auto& f : P.facets()) {
      Integer acc = 0;
      for (int i = 0; i < n; ++i) acc += f.normal[i] * z[i];
      if (acc < k * f.offset) {
        inside = false;
        break;
      }
    }
    if (inside) {
      BSPoint b;
      b.point.resize(n);
      for (int i = 0; i < n; ++i) b.point[i] = Rational(z[i], k);
      b.level = k;
      b.strict_level = lcm_of_denominators(b.point);
      b.face_codim = static_cast<int>(P.active_facets(b.point).size());
      out.push_back(std::move(b));
    }
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

std::vector<std::complex<double>> fiber_holonomy(const DelzantPolytope& P, const RationalVector& b, Integer k) {
  if (!P.contains(b)) throw Error(ErrorCode::PointOutside, "holonomy base point is not in P");
  std::vector<std::complex<double>> out;
  for (const auto& bi : b) {
    Rational t = bi * k;
    t -= floor_div(t);
    if (t == Rational(0)) {
      out.emplace_back(1.0, 0.0);
    } else {
      out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * to_double(t)));
    }
  }
  return out;
}

}  // namespace toricspec
