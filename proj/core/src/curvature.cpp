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

#include "toricspec/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "toricspec/error.hpp"
#include "toricspec/linalg.hpp"

namespace toricspec {

namespace {

Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      Eigen::MatrixXd sub(n - 1, n - 1);
      for (Eigen::Index i = 0, si = 0; i < n; ++i) {
        if (i == p) continue;
        for (Eigen::Index j = 0, sj = 0; j < n; ++j) {
          if (j == q) continue;
          sub(si, sj++) = M(i, j);
        }
        ++si;
      }
      C(p, q) = ((p + q) % 2 ? -1.0 : 1.0) * (n == 1 ? 1.0 : sub.determinant());
    }
  }
  return C;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return g;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

RicciData ricci_general(const SymplecticPotential& u, const Eigen::VectorXd& x, double s) {
  const int n = u.dim();
  const Jet j = u.jet(x, 4);
  const Eigen::MatrixXd& G = j.hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success || !linalg::is_positive_definite(G))
    throw Error(ErrorCode::SingularG, "G is not positive definite");
  const Eigen::MatrixXd Gi = llt.solve(Eigen::MatrixXd::Identity(n, n));

  // L = log det G^{-1}
  Eigen::VectorXd dL(n);
  std::vector<Eigen::MatrixXd> GidG(n);
  for (int h = 0; h < n; ++h) {
    GidG[h] = Gi * j.third[h];
    dL[h] = -GidG[h].trace();
  }
  Eigen::MatrixXd ddL(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) ddL(a, b) = (GidG[a] * GidG[b]).trace() - (Gi * j.fourth[a][b]).trace();

  Eigen::MatrixXd R(n, n);
  for (int a = 0; a < n; ++a) {
    const Eigen::VectorXd dw = -GidG[a] * (Gi * dL) + Gi * ddL.col(a);
    R.row(a) = -dw.transpose();
  }

  RicciData out;
  out.x = x;
  out.s = s;
  out.R = R;
  out.T = R * G;
  out.rho = 0.25 * Gi * R;
  out.min_ratio = linalg::generalized_min_eigenvalue(out.T, G);
  return out;
}

RicciData ricci_general(const PotentialSpec& spec, double s, const Eigen::VectorXd& x) {
  return ricci_general(spec.at(s), x, s);
}

SymplecticPotential model_potential(const ModelSpec& model, double s) {
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(model.m, model.n);
  for (int j = 0; j < model.m; ++j) normals(j, j) = 1.0;
  return SymplecticPotential(normals, Eigen::VectorXd::Zero(model.m), 0.5,
                             PolynomialFn::quadratic(model.A).scaled(1.0 / s));
}

Eigen::VectorXd model_point(const ModelSpec& model, double s) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.n);
  for (int j = 0; j < model.m; ++j) x[j] = s / (2.0 * model.y[j]);
  return x;
}

Eigen::MatrixXd model_T(const ModelSpec& model, double s) {
  const int n = model.n, m = model.m;
  Eigen::MatrixXd M = model.A;
  for (int j = 0; j < m; ++j) M(j, j) += model.y[j];
  const double D = M.determinant();
  const Eigen::MatrixXd C = cofactor_matrix(M);
  const auto& y = model.y;
  const double s2 = s * s;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i != j) {
        T(j, i) = -4.0 / s2 * y[j] * y[j] * y[i] * y[i] * C(i, j) * C(i, j) / (D * D);
        continue;
      }
      double t = 0.0;
      for (int h = 0; h < m; ++h)
        if (h != j) t += -4.0 / s2 * y[j] * y[j] * y[h] * y[h] * C(j, h) * C(h, h) / (D * D);
      t += 8.0 * std::pow(y[j], 3) * C(j, j) / (s2 * D);
      t -= 8.0 * std::pow(y[j], 4) * C(j, j) * C(j, j) / (s2 * D * D);
      T(j, j) = t;
    }
  }
  return T;
}

ModelTPrime model_T_prime(const Eigen::VectorXd& y, const Eigen::VectorXd& x_rest, double s, int n, int m) {
  ModelTPrime out;
  out.diagonal = Eigen::VectorXd::Zero(n);
  out.ratio = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < m; ++j) {
    const double yj = y[j];
    out.diagonal[j] = 8.0 * yj * yj * yj / (s * s * (yj + 1.0) * (yj + 1.0));
    out.ratio[j] = 8.0 * yj * yj * yj / (s * std::pow(yj + 1.0, 3));
  }
  for (int j = m; j < n; ++j) {
    const double xj = x_rest[j - m];
    const double yj = s / (2.0 * xj);
    out.diagonal[j] = 8.0 * yj * yj * yj * (1.0 - yj) / (s * s);
    out.ratio[j] = s * s / (xj * xj * xj) * (1.0 - s / (2.0 * xj));
  }
  return out;
}

double principal_minor(const Eigen::MatrixXd& A, const std::vector<int>& I) {
  if (I.empty()) return 1.0;
  const auto k = static_cast<Eigen::Index>(I.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = A(I[a], I[b]);
  return sub.determinant();
}

bool minor_identity_check(const Eigen::MatrixXd& A, const std::vector<int>& I, double rel_tol) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularA, "matrix is singular");
  const auto n = static_cast<int>(A.rows());
  std::vector<int> complement;
  for (int i = 0; i < n; ++i)
    if (std::find(I.begin(), I.end(), i) == I.end()) complement.push_back(i);
  const double lhs = principal_minor(A, I);
  const double rhs = lu.determinant() * principal_minor(lu.inverse(), complement);
  const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  return std::abs(lhs - rhs) <= rel_tol * scale;
}

bool ScanSummary::bounded_below(double tol) const {
  for (std::size_t i = 1; i < infimum.size(); ++i)
    if (infimum[i] < infimum[i - 1] - tol * std::max(1.0, std::abs(infimum[i - 1]))) return false;
  return !infimum.empty();
}

bool ScanSummary::decreasing_without_bound(double tol) const {
  if (infimum.size() < 2) return false;
  for (std::size_t i = 1; i < infimum.size(); ++i)
    if (!(infimum[i] < infimum[i - 1] - tol * std::max(1.0, std::abs(infimum[i - 1])))) return false;
  return true;
}

std::string ScanSummary::to_csv() const {
  std::ostringstream os;
  const Eigen::Index n = rows.empty() ? 0 : rows.front().x.size();
  os << "s";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << ",min_ratio\n";
  for (const auto& r : rows) {
    os << fmt(r.s);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << fmt(r.x[i]);
    os << ',' << fmt(r.min_ratio) << '\n';
  }
  return os.str();
}

std::string ScanSummary::summary_json() const {
  nlohmann::ordered_json j;
  j["s"] = s_values;
  j["infimum"] = infimum;
  j["bounded_below"] = bounded_below();
  j["decreasing_without_bound"] = decreasing_without_bound();
  return j.dump(2);
}

ScanSummary ricci_lower_bound_scan(const ModelSpec& model, const std::vector<double>& s_values,
                                   const ModelScanRegion& region) {
  std::vector<std::vector<double>> axes;
  int uncapped = 0;
  for (int j = 0; j < model.m; ++j) {
    const std::optional<double> cap =
        j < static_cast<int>(region.z_cap.size()) ? region.z_cap[j] : std::optional<double>{};
    if (!cap) ++uncapped;
    axes.push_back(log_grid(region.z_min, cap ? *cap : region.z_max, region.points_per_axis));
  }
  if (uncapped >= 2 && !region.allow_codim_two)
    throw Error(ErrorCode::RegionTouchesCodimTwo, "two active axes may approach their facets together");

  ScanSummary out;
  for (double s : s_values) {
    const SymplecticPotential u = model_potential(model, s);
    double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      ModelSpec at = model;
      at.y.resize(model.m);
      for (int j = 0; j < model.m; ++j) at.y[j] = axes[j][idx[j]] * std::sqrt(s);
      const Eigen::VectorXd x = model_point(at, s);
      const double r = ricci_general(u, x, s).min_ratio;
      inf = std::min(inf, r);
      out.rows.push_back({s, x, r});
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
      if (a == idx.size()) break;
    }
    out.s_values.push_back(s);
    out.infimum.push_back(inf);
  }
  return out;
}

ScanSummary ricci_lower_bound_scan(const PotentialSpec& spec, const std::vector<double>& s_values,
                                   const SpecScanRegion& region) {
  const auto& P = spec.polytope;
  const int n = P.dim();
  Eigen::VectorXd lo = to_eigen(P.vertices().front()), hi = lo;
  for (const auto& v : P.vertices()) {
    lo = lo.cwiseMin(to_eigen(v));
    hi = hi.cwiseMax(to_eigen(v));
  }
  ScanSummary out;
  for (double s : s_values) {
    const SymplecticPotential u = spec.at(s);
    const double width = region.exclusion * std::sqrt(s);
    double inf = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    while (true) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / region.points_per_axis;
      const Eigen::VectorXd l = P.slacks(x);
      int near = 0;
      for (Eigen::Index r = 0; r < l.size(); ++r) near += l[r] < width;
      if (l.minCoeff() > 0.0 && (near < 2 || region.allow_codim_two)) {
        const double r = ricci_general(u, x, s).min_ratio;
        inf = std::min(inf, r);
        out.rows.push_back({s, x, r});
      }
      int a = 0;
      while (a < n && ++idx[a] == region.points_per_axis) idx[a++] = 0;
      if (a == n) break;
    }
    out.s_values.push_back(s);
    out.infimum.push_back(inf);
  }
  return out;
}

Eigen::MatrixXd christoffel_ricci_oracle(const SymplecticPotential& u, const Eigen::VectorXd& x) {
  const int n = u.dim(), D = 2 * n;
  const double ms = u.min_slack(x);
  const double h = std::isfinite(ms) ? 1e-4 * ms : 1e-4 * std::max(1.0, x.norm());

  auto metric = [&](const Eigen::VectorXd& p) {
    if (u.min_slack(p) <= 0.0) throw Error(ErrorCode::StepTooLarge, "finite-difference stencil leaves P");
    const Eigen::MatrixXd G = u.hessian(p);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(D, D);
    g.topLeftCorner(n, n) = G;
    g.bottomRightCorner(n, n) = G.inverse();
    return g;
  };
  auto shifted = [&](int a, double ta, int b, double tb) {
    Eigen::VectorXd p = x;
    if (a >= 0) p[a] += ta;
    if (b >= 0) p[b] += tb;
    return metric(p);
  };

  const Eigen::MatrixXd g0 = metric(x);
  const Eigen::MatrixXd gi = g0.inverse();
  std::vector<Eigen::MatrixXd> dg(D, Eigen::MatrixXd::Zero(D, D));
  std::vector<std::vector<Eigen::MatrixXd>> ddg(D, std::vector<Eigen::MatrixXd>(D, Eigen::MatrixXd::Zero(D, D)));
  for (int a = 0; a < n; ++a) {
    const Eigen::MatrixXd p1 = shifted(a, h, -1, 0), m1 = shifted(a, -h, -1, 0);
    const Eigen::MatrixXd p2 = shifted(a, 2 * h, -1, 0), m2 = shifted(a, -2 * h, -1, 0);
    dg[a] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    ddg[a][a] = (-p2 + 16.0 * p1 - 30.0 * g0 + 16.0 * m1 - m2) / (12.0 * h * h);
    for (int b = 0; b < a; ++b) {
      auto mixed = [&](double t) -> Eigen::MatrixXd {
        return (shifted(a, t, b, t) - shifted(a, t, b, -t) - shifted(a, -t, b, t) + shifted(a, -t, b, -t)) /
               (4.0 * t * t);
      };
      ddg[a][b] = ddg[b][a] = (4.0 * mixed(h) - mixed(2.0 * h)) / 3.0;
    }
  }

  // Γ^a_{bc} stored as gamma[a](b,c)
  std::vector<Eigen::MatrixXd> gamma(D, Eigen::MatrixXd::Zero(D, D));
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(D, std::vector<Eigen::MatrixXd>(D, Eigen::MatrixXd::Zero(D, D)));
  std::vector<Eigen::MatrixXd> dgi(D, Eigen::MatrixXd::Zero(D, D));
  for (int e = 0; e < n; ++e) dgi[e] = -gi * dg[e] * gi;
  for (int a = 0; a < D; ++a) {
    for (int b = 0; b < D; ++b) {
      for (int c = 0; c < D; ++c) {
        double acc = 0.0;
        for (int d = 0; d < D; ++d) acc += gi(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        gamma[a](b, c) = 0.5 * acc;
        for (int e = 0; e < n; ++e) {
          double de = 0.0;
          for (int d = 0; d < D; ++d) {
            de += dgi[e](a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
            de += gi(a, d) * (ddg[e][b](d, c) + ddg[e][c](d, b) - ddg[e][d](b, c));
          }
          dgamma[e][a](b, c) = 0.5 * de;
        }
      }
    }
  }

  Eigen::MatrixXd Ric = Eigen::MatrixXd::Zero(D, D);
  for (int b = 0; b < D; ++b) {
    for (int c = 0; c < D; ++c) {
      double acc = 0.0;
      for (int a = 0; a < D; ++a) {
        acc += dgamma[a][a](b, c) - dgamma[c][a](a, b);
        for (int d = 0; d < D; ++d) acc += gamma[a](a, d) * gamma[d](b, c) - gamma[a](c, d) * gamma[d](a, b);
      }
      Ric(b, c) = acc;
    }
  }
  return Ric;
}

Eigen::MatrixXd christoffel_ricci_oracle(const PotentialSpec& spec, double s, const Eigen::VectorXd& x) {
  return christoffel_ricci_oracle(spec.at(s), x);
}

}  // namespace toricspec
