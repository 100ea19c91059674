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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toricspec/limit.hpp"
#include "toricspec/reduced_operator.hpp"

namespace toricspec {

struct MeshSchedule {
  std::optional<double> fixed_h;  // overrides the √s rule
  double h_scale = 1.0 / 40.0;    // h(s) = max(h_scale·√s, h_floor)
  double h_floor = 0.0;           // 0 picks 1/800 (1D) or 1/80 (2D)
  double grading = 0.7;

  double h(double s, int dim) const;
};

struct SweepConfig {
  PotentialSpec spec = PotentialSpec::standard(DelzantPolytope::from_facets(1, {{{1}, 0}, {{-1}, -1}}));
  std::vector<int> levels{1};
  std::vector<double> s_values{0.2, 0.1, 0.05, 0.02};  // descending
  MeshSchedule mesh;
  int eigencount = 3;
  int margin = 1;
  std::vector<double> localization_c{1, 2, 3, 4, 5, 6, 8};
  double mass_threshold = 0.99;
  int workers = 1;
  std::filesystem::path output = "results";

  void validate() const;
};

// Keys: polytope, potential (inline objects or file paths), k, s, mesh {h, h_scale, h_floor, grading},
// eigencount, margin, localization_c, workers, output.
SweepConfig sweep_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
nlohmann::json sweep_config_to_json(const SweepConfig& config);

struct ModeResult {
  int k = 1;
  IntVector mode;
  double s = 0.0;
  bool bs = false;
  std::optional<DbarSpectrum> spectrum;  // empty after a solver failure
  std::string failure;
  // Lowest eigenvalues on the 2h mesh, smallest s and BS modes only.
  std::optional<Eigen::VectorXd> coarse;
};

struct ConvergenceRow {
  double s = 0.0;
  std::vector<double> computed;
  std::vector<double> predicted;
  std::vector<double> gaps;           // absolute
  std::vector<double> relative_gaps;  // |λ - μ| / max(μ, 1)
};

struct BSTrack {
  int k = 1;
  BSPoint b;
  IntVector mode;
  LimitSpectrum limit;
  std::vector<ConvergenceRow> rows;  // sweep order
  std::vector<double> discretization;   // per eigenvalue at the smallest s
  std::vector<double> extrapolated;     // λ at s → 0 from the tail
  std::vector<double> extrapolated_relative_gaps;
};

struct KernelCountRow {
  int k = 1;
  double s = 0.0;
  int zero_modes = 0;
  int lattice_points = 0;
};

struct LocalizationRow {
  int k = 1;
  IntVector mode;
  double s = 0.0;
  int index = 0;  // eigenfunction number
  std::vector<double> mass;  // per c in the c-grid
  double c_min = 0.0;        // smallest c holding the threshold mass
};

struct Verdict {
  std::string name;
  bool pass = false;
  bool informational = false;
  std::string detail;
};

struct ConvergenceReport {
  SweepConfig config;
  std::vector<ModeResult> modes;
  std::vector<BSTrack> tracks;
  std::vector<KernelCountRow> kernel_counts;
  std::vector<LocalizationRow> localization;
  std::vector<Verdict> verdicts;
  std::vector<std::string> failures;

  bool partial() const { return !failures.empty(); }
  bool passed() const;
  const Verdict* verdict(const std::string& name) const;
};

ConvergenceReport run_sweep(const SweepConfig& config);

// Fraction of the L² mass of a nodal P1 function inside ∪_b B(b, c·√s), one entry per c, and the
// smallest c reaching `threshold`.
struct MassProfile {
  std::vector<double> mass;
  double c_min = 0.0;
};
MassProfile localization_profile(const Mesh& mesh, const Eigen::VectorXd& nodal, const std::vector<Eigen::VectorXd>& centers,
                                 double s, const std::vector<double>& c_grid, double threshold = 0.99);

// Localization rows for every BS-mode eigenfunction kept in the report.
std::vector<LocalizationRow> localization_check(const ConvergenceReport& report);

struct FiberDiameterRow {
  double s = 0.0;
  double constant = 0.0;  // max over the grid of λ_max(G_s^{-1}) / s
};
struct FiberDiameterCheck {
  std::vector<FiberDiameterRow> rows;
  double bound = 0.0;  // max over the grid of 1/λ_min(Hess ψ)
  bool bounded = false;
};
FiberDiameterCheck fiber_diameter_check(const PotentialSpec& spec, const std::vector<double>& s_values,
                                        int points_per_axis = 21, bool boundary_graded = true);

// Relative gap normalization shared by the sweep and the acceptance checks.
inline double relative_gap(double computed, double predicted) {
  return std::abs(computed - predicted) / std::max(predicted, 1.0);
}

// λ(s) = λ0 + a√s + b s through the last three samples, or linear in √s through the last two.
double extrapolate_to_zero(const std::vector<double>& s, const std::vector<double>& values);

}  // namespace toricspec
