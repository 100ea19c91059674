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

#include "toricspec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "toricspec/error.hpp"
#include "toricspec/json_io.hpp"
#include "toricspec/linalg.hpp"

namespace toricspec {

namespace {

constexpr double kZeroThreshold = 1e-3;
constexpr double kPersistenceThreshold = 5e-4;
constexpr double kMatchTolerance = 0.05;
constexpr double kTrendNoise = 0.10;
constexpr double kLocalizationNoise = 0.20;
constexpr double kLocalizationRadius = 5.0;
constexpr double kLocalizationScale = 0.1;  // c_min ≤ 5 is asserted for s ≤ this

void run_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string mode_label(const IntVector& m) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  os << ')';
  return os.str();
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

double MeshSchedule::h(double s, int dim) const {
  if (fixed_h) return *fixed_h;
  const double floor = h_floor > 0.0 ? h_floor : (dim == 1 ? 1.0 / 800.0 : 1.0 / 80.0);
  return std::max(h_scale * std::sqrt(s), floor);
}

void SweepConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, what); };
  if (spec.dim() > 2) throw Error(ErrorCode::DimensionUnsupported, "sweeps support n <= 2");
  if (levels.empty()) bad("k-list is empty");
  for (int k : levels)
    if (k < 1) bad("levels must be positive");
  if (s_values.empty()) bad("s-list is empty");
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (!(s_values[i] > 0.0)) bad("s-values must be positive");
    if (i && !(s_values[i] < s_values[i - 1])) bad("s-list must be strictly descending");
  }
  if (eigencount < 1) bad("eigencount must be at least 1");
  if (margin < 0) bad("margin must be nonnegative");
  if (workers < 1) bad("workers must be at least 1");
  if (mesh.fixed_h && !(*mesh.fixed_h > 0.0)) bad("mesh h must be positive");
  if (!(mesh.h_scale > 0.0) || mesh.h_floor < 0.0) bad("mesh scale must be positive");
  if (!(mesh.grading > 0.0 && mesh.grading <= 1.0)) bad("grading must lie in (0, 1]");
  if (!(mass_threshold > 0.0 && mass_threshold < 1.0)) bad("mass threshold must lie in (0, 1)");
  if (localization_c.empty()) bad("localization c-grid is empty");
}

SweepConfig sweep_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "sweep config must be a JSON object");
  SweepConfig c;
  try {
    if (j.contains("polytope")) {
      const DelzantPolytope P = polytope_from_json(resolve_json(j["polytope"], base_dir));
      c.spec = potential_from_json(j.contains("potential") ? resolve_json(j["potential"], base_dir) : nlohmann::json(), P);
    } else if (j.contains("potential")) {
      throw Error(ErrorCode::InvalidInput, "a potential needs a polytope");
    }
    if (j.contains("k")) c.levels = j["k"].get<std::vector<int>>();
    if (j.contains("s")) c.s_values = j["s"].get<std::vector<double>>();
    if (j.contains("mesh")) {
      const auto& m = j["mesh"];
      if (m.contains("h")) c.mesh.fixed_h = m["h"].get<double>();
      if (m.contains("h_scale")) c.mesh.h_scale = m["h_scale"].get<double>();
      if (m.contains("h_floor")) c.mesh.h_floor = m["h_floor"].get<double>();
      if (m.contains("grading")) c.mesh.grading = m["grading"].get<double>();
    }
    if (j.contains("eigencount")) c.eigencount = j["eigencount"].get<int>();
    if (j.contains("margin")) c.margin = j["margin"].get<int>();
    if (j.contains("localization_c")) c.localization_c = j["localization_c"].get<std::vector<double>>();
    if (j.contains("mass_threshold")) c.mass_threshold = j["mass_threshold"].get<double>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json sweep_config_to_json(const SweepConfig& c) {
  nlohmann::json mesh = {{"h_scale", c.mesh.h_scale}, {"h_floor", c.mesh.h_floor}, {"grading", c.mesh.grading}};
  if (c.mesh.fixed_h) mesh["h"] = *c.mesh.fixed_h;
  return {{"polytope", polytope_to_json(c.spec.polytope)},
          {"potential", potential_to_json(c.spec)},
          {"k", c.levels},
          {"s", c.s_values},
          {"mesh", mesh},
          {"eigencount", c.eigencount},
          {"margin", c.margin},
          {"localization_c", c.localization_c},
          {"mass_threshold", c.mass_threshold}};
}

bool ConvergenceReport::passed() const {
  if (partial()) return false;
  for (const auto& v : verdicts)
    if (!v.informational && !v.pass) return false;
  return true;
}

const Verdict* ConvergenceReport::verdict(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

double extrapolate_to_zero(const std::vector<double>& s, const std::vector<double>& values) {
  const std::size_t n = std::min(s.size(), values.size());
  if (n == 0) throw Error(ErrorCode::InvalidInput, "nothing to extrapolate");
  if (n == 1) return values[0];
  if (n == 2) {
    const double t0 = std::sqrt(s[0]), t1 = std::sqrt(s[1]);
    return values[1] - (values[0] - values[1]) * t1 / (t0 - t1);
  }
  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    const std::size_t idx = n - 3 + static_cast<std::size_t>(i);
    A(i, 0) = 1.0;
    A(i, 1) = std::sqrt(s[idx]);
    A(i, 2) = s[idx];
    rhs[i] = values[idx];
  }
  return A.colPivHouseholderQr().solve(rhs)[0];
}

MassProfile localization_profile(const Mesh& mesh, const Eigen::VectorXd& nodal, const std::vector<Eigen::VectorXd>& centers,
                                 double s, const std::vector<double>& c_grid, double threshold) {
  const QuadratureRule& rule = interior_rule(mesh.dim);
  std::vector<std::pair<double, double>> samples;  // (scaled distance, mass)
  double total = 0.0;
  const double scale = 1.0 / std::sqrt(s);
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const double area = mesh.cell_measure(c);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::VectorXd& b = rule.barycentric[q];
      double u = 0.0;
      for (int i = 0; i <= mesh.dim; ++i) u += b[i] * nodal[mesh.cells[c][i]];
      const Eigen::VectorXd x = mesh.point(c, b);
      double d = std::numeric_limits<double>::infinity();
      for (const auto& center : centers) d = std::min(d, (x - center).norm());
      const double w = rule.weights[q] * area * u * u;
      samples.emplace_back(d * scale, w);
      total += w;
    }
  }
  std::sort(samples.begin(), samples.end());
  MassProfile out;
  out.mass.assign(c_grid.size(), 0.0);
  double acc = 0.0;
  bool found = false;
  std::size_t g = 0;
  std::vector<std::size_t> order(c_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c_grid[a] < c_grid[b]; });
  for (const auto& [d, w] : samples) {
    while (g < order.size() && c_grid[order[g]] < d) out.mass[order[g++]] = acc / total;
    acc += w;
    if (!found && acc >= threshold * total) {
      out.c_min = d;
      found = true;
    }
  }
  while (g < order.size()) out.mass[order[g++]] = acc / total;
  if (!found) out.c_min = samples.empty() ? 0.0 : samples.back().first;
  return out;
}

std::vector<LocalizationRow> localization_check(const ConvergenceReport& report) {
  const auto& cfg = report.config;
  std::map<int, std::vector<Eigen::VectorXd>> centers;
  for (int k : cfg.levels)
    for (const auto& b : bs_points(cfg.spec.polytope, k)) centers[k].push_back(to_eigen(b.point));
  std::vector<LocalizationRow> rows;
  for (const auto& r : report.modes) {
    if (!r.bs || !r.spectrum) continue;
    const auto& sp = *r.spectrum;
    for (Eigen::Index j = 0; j < sp.vectors.cols(); ++j) {
      const MassProfile prof =
          localization_profile(*sp.mesh, sp.vectors.col(j), centers[r.k], r.s, cfg.localization_c, cfg.mass_threshold);
      rows.push_back({r.k, r.mode, r.s, static_cast<int>(j), prof.mass, prof.c_min});
    }
  }
  return rows;
}

ConvergenceReport run_sweep(const SweepConfig& config) {
  config.validate();
  const PotentialSpec& spec = config.spec;
  const DelzantPolytope& P = spec.polytope;
  const int n = spec.dim();
  const std::size_t ns = config.s_values.size();
  const double s_last = config.s_values.back();

  ConvergenceReport report;
  report.config = config;

  // Meshes and metric fields, one per s plus the 2h mesh at the smallest s.
  std::vector<QuadratureField> fields(ns + 1);
  run_parallel(ns + 1, config.workers, [&](std::size_t i) {
    const double s = i < ns ? config.s_values[i] : s_last;
    const double h = config.mesh.h(s, n) * (i < ns ? 1.0 : 2.0);
    auto mesh = std::make_shared<const Mesh>(build_mesh(P, h, config.mesh.grading));
    fields[i] = quadrature_field(spec, s, std::move(mesh));
  });

  struct Task {
    std::size_t field;
    int k;
    IntVector mode;
    bool bs;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < ns; ++i)
    for (int k : config.levels)
      for (const auto& m : mode_set(P, k, config.margin)) tasks.push_back({i, k, m, is_bs_mode(P, k, m)});
  const std::size_t fine_tasks = tasks.size();
  for (int k : config.levels)
    for (const auto& m : mode_set(P, k, config.margin))
      if (is_bs_mode(P, k, m)) tasks.push_back({ns, k, m, true});

  std::vector<ModeResult> results(tasks.size());
  run_parallel(tasks.size(), config.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    ModeResult& r = results[t];
    r.k = task.k;
    r.mode = task.mode;
    r.s = fields[task.field].s;
    r.bs = task.bs;
    const int count = std::min(task.bs ? config.eigencount : 1, fields[task.field].mesh->node_count());
    try {
      DbarSpectrum sp = dbar_spectrum(fields[task.field], task.k, task.mode, count);
      if (!task.bs) sp.vectors.resize(0, 0);
      r.spectrum = std::move(sp);
    } catch (const Error& e) {
      if (!e.is_solver_failure()) throw;
      r.failure = e.what();
    }
  });

  // Attach the 2h solves to their fine counterparts.
  for (std::size_t t = fine_tasks; t < tasks.size(); ++t) {
    for (std::size_t f = 0; f < fine_tasks; ++f) {
      if (tasks[f].field + 1 == ns && tasks[f].k == tasks[t].k && tasks[f].mode == tasks[t].mode) {
        if (results[t].spectrum) results[f].coarse = results[t].spectrum->dbar_eigenvalues;
        else results[f].failure = results[f].failure.empty() ? results[t].failure : results[f].failure;
      }
    }
  }
  results.resize(fine_tasks);
  for (const auto& r : results)
    if (!r.failure.empty()) report.failures.push_back("k=" + std::to_string(r.k) + " s=" + format_g(r.s) + " m=" + mode_label(r.mode) + ": " + r.failure);
  report.modes = std::move(results);

  auto find = [&](int k, const IntVector& m, double s) -> const ModeResult* {
    for (const auto& r : report.modes)
      if (r.k == k && r.s == s && r.mode == m) return &r;
    return nullptr;
  };

  // Kernel counts.
  for (int k : config.levels) {
    const int lattice = static_cast<int>(bs_points(P, k).size());
    for (double s : config.s_values) {
      int zeros = 0;
      for (const auto& r : report.modes)
        if (r.k == k && r.s == s && r.spectrum && r.spectrum->dbar_eigenvalues[0] < kZeroThreshold) ++zeros;
      report.kernel_counts.push_back({k, s, zeros, lattice});
    }
  }

  // Tracks against the predicted limits.
  for (int k : config.levels) {
    for (auto& [b, limit] : predicted_limit(spec, k, config.eigencount)) {
      BSTrack track;
      track.k = k;
      track.b = b;
      track.limit = limit;
      for (const auto& q : b.point) track.mode.push_back((q * k).numerator());
      const std::vector<double> predicted = limit.expanded(static_cast<std::size_t>(config.eigencount));
      for (double s : config.s_values) {
        const ModeResult* r = find(k, track.mode, s);
        if (!r || !r->spectrum) continue;
        ConvergenceRow row;
        row.s = s;
        const auto& ev = r->spectrum->dbar_eigenvalues;
        for (Eigen::Index j = 0; j < ev.size() && j < static_cast<Eigen::Index>(predicted.size()); ++j) {
          row.computed.push_back(ev[j]);
          row.predicted.push_back(predicted[j]);
          row.gaps.push_back(std::abs(ev[j] - predicted[j]));
          row.relative_gaps.push_back(relative_gap(ev[j], predicted[j]));
        }
        track.rows.push_back(std::move(row));
      }
      if (const ModeResult* r = find(k, track.mode, s_last); r && r->spectrum && r->coarse) {
        const auto& fine = r->spectrum->dbar_eigenvalues;
        for (Eigen::Index j = 0; j < fine.size() && j < r->coarse->size(); ++j)
          track.discretization.push_back(std::abs(fine[j] - (*r->coarse)[j]) / 3.0);
      }
      if (!track.rows.empty()) {
        const std::size_t cols = track.rows.back().computed.size();
        for (std::size_t j = 0; j < cols; ++j) {
          std::vector<double> ss, vs;
          for (const auto& row : track.rows)
            if (j < row.computed.size()) {
              ss.push_back(row.s);
              vs.push_back(row.computed[j]);
            }
          const double x = extrapolate_to_zero(ss, vs);
          track.extrapolated.push_back(x);
          track.extrapolated_relative_gaps.push_back(relative_gap(x, predicted[j]));
        }
      }
      report.tracks.push_back(std::move(track));
    }
  }

  report.localization = localization_check(report);

  // Verdicts.
  {
    Verdict v{"kernel_count", true, false, ""};
    for (const auto& row : report.kernel_counts)
      if (row.zero_modes != row.lattice_points) {
        v.pass = false;
        v.detail += "k=" + std::to_string(row.k) + " s=" + format_g(row.s) + ": " + std::to_string(row.zero_modes) +
                    " zero modes vs " + std::to_string(row.lattice_points) + " lattice points; ";
      }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"bs_zero_persistence", true, false, ""};
    for (const auto& r : report.modes)
      if (r.bs && r.spectrum && !(r.spectrum->dbar_eigenvalues[0] < kPersistenceThreshold)) {
        v.pass = false;
        v.detail += "k=" + std::to_string(r.k) + " s=" + format_g(r.s) + " m=" + mode_label(r.mode) + ": " +
                    format_g(r.spectrum->dbar_eigenvalues[0]) + "; ";
      }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"limit_matching", true, false, ""};
    for (const auto& t : report.tracks) {
      if (t.rows.empty() || t.rows.back().s != s_last) {
        v.pass = false;
        v.detail += "k=" + std::to_string(t.k) + " m=" + mode_label(t.mode) + ": no result at the smallest s; ";
        continue;
      }
      const auto& row = t.rows.back();
      for (std::size_t j = 0; j < row.computed.size() && j < 3; ++j) {
        const double disc = j < t.discretization.size() ? t.discretization[j] / std::max(row.predicted[j], 1.0) : 0.0;
        const double tol = std::max(kMatchTolerance, 2.0 * disc);
        if (row.relative_gaps[j] > tol) {
          v.pass = false;
          v.detail += "k=" + std::to_string(t.k) + " m=" + mode_label(t.mode) + " j=" + std::to_string(j) + ": gap " +
                      format_g(row.relative_gaps[j]) + " > " + format_g(tol) + "; ";
        }
      }
    }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"gap_trend", true, false, ""};
    for (const auto& t : report.tracks)
      for (std::size_t i = 1; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.rows[i].relative_gaps.size() && j < t.rows[i - 1].relative_gaps.size(); ++j)
          if (t.rows[i].relative_gaps[j] > (1.0 + kTrendNoise) * t.rows[i - 1].relative_gaps[j] + 1e-3) {
            v.pass = false;
            v.detail += "k=" + std::to_string(t.k) + " m=" + mode_label(t.mode) + " j=" + std::to_string(j) +
                        " s=" + format_g(t.rows[i].s) + "; ";
          }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"extrapolated_matching", true, true, ""};
    for (const auto& t : report.tracks)
      for (std::size_t j = 0; j < t.extrapolated_relative_gaps.size(); ++j)
        if (t.extrapolated_relative_gaps[j] > kMatchTolerance) {
          v.pass = false;
          v.detail += "k=" + std::to_string(t.k) + " m=" + mode_label(t.mode) + " j=" + std::to_string(j) + ": " +
                      format_g(t.extrapolated_relative_gaps[j]) + "; ";
        }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"localization", true, false, ""};
    std::map<std::tuple<int, IntVector, int>, std::vector<const LocalizationRow*>> series;
    for (const auto& row : report.localization) series[{row.k, row.mode, row.index}].push_back(&row);
    for (const auto& [key, rows] : series) {
      const auto& [k, mode, idx] = key;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i]->s <= kLocalizationScale + 1e-12 && rows[i]->c_min > kLocalizationRadius) {
          v.pass = false;
          v.detail += "k=" + std::to_string(k) + " m=" + mode_label(mode) + " j=" + std::to_string(idx) + " s=" +
                      format_g(rows[i]->s) + ": c_min " + format_g(rows[i]->c_min) + "; ";
        }
        // rows run in decreasing s, so c_min(s) nonincreasing in s means it may not drop as s shrinks
        if (i && rows[i - 1]->s <= kLocalizationScale + 1e-12 &&
            (1.0 + kLocalizationNoise) * rows[i]->c_min < rows[i - 1]->c_min) {
          v.pass = false;
          v.detail += "k=" + std::to_string(k) + " m=" + mode_label(mode) + " j=" + std::to_string(idx) +
                      ": c_min drops at s=" + format_g(rows[i]->s) + "; ";
        }
      }
    }
    report.verdicts.push_back(v);
  }
  {
    Verdict v{"non_bs_divergence", true, true, ""};
    for (int k : config.levels)
      for (const auto& m : mode_set(P, k, config.margin)) {
        if (is_bs_mode(P, k, m)) continue;
        double prev = -1.0;
        for (double s : config.s_values) {
          const ModeResult* r = find(k, m, s);
          if (!r || !r->spectrum) continue;
          const double val = r->spectrum->dbar_eigenvalues[0];
          if (prev >= 0.0 && !(val > prev)) {
            v.pass = false;
            v.detail += "k=" + std::to_string(k) + " m=" + mode_label(m) + " s=" + format_g(s) + "; ";
          }
          prev = val;
        }
      }
    report.verdicts.push_back(v);
  }
  return report;
}

FiberDiameterCheck fiber_diameter_check(const PotentialSpec& spec, const std::vector<double>& s_values,
                                        int points_per_axis, bool boundary_graded) {
  const DelzantPolytope& P = spec.polytope;
  const int n = P.dim();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& v : P.vertices()) {
    lo = lo.cwiseMin(to_eigen(v));
    hi = hi.cwiseMax(to_eigen(v));
  }
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(n, 0);
  while (true) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / points_per_axis;
    if (P.slacks(x).minCoeff() > 0.0) grid.push_back(x);
    int i = n - 1;
    while (i >= 0 && ++idx[i] == points_per_axis) idx[i--] = 0;
    if (i < 0) break;
  }
  if (boundary_graded) {
    const std::size_t base = grid.size();
    const Eigen::MatrixXd& N = P.normal_matrix();
    for (std::size_t g = 0; g < base; ++g)
      for (Eigen::Index r = 0; r < N.rows(); ++r)
        for (double delta : {1e-3, 1e-6}) {
          const Eigen::VectorXd nu = N.row(r).transpose();
          const Eigen::VectorXd x = grid[g] - (P.slacks(grid[g])[r] - delta) * nu / nu.squaredNorm();
          if (P.slacks(x).minCoeff() > 0.0) grid.push_back(x);
        }
  }
  FiberDiameterCheck out;
  for (const auto& x : grid) {
    const double lmin = linalg::symmetric_eigenvalues(spec.psi.jet(x, 2).hessian)[0];
    out.bound = std::max(out.bound, 1.0 / lmin);
  }
  out.bounded = true;
  for (double s : s_values) {
    const SymplecticPotential u = spec.at(s);
    double worst = 0.0;
    for (const auto& x : grid) worst = std::max(worst, 1.0 / linalg::symmetric_eigenvalues(u.hessian(x))[0]);
    out.rows.push_back({s, worst / s});
    if (worst / s > out.bound * (1.0 + 1e-9)) out.bounded = false;
  }
  return out;
}

}  // namespace toricspec
