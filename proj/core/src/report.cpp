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

#include "toricspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "toricspec/error.hpp"
#include "toricspec/json_io.hpp"

namespace toricspec {

namespace {

std::string mode_string(const IntVector& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? " " : "") + std::to_string(m[i]);
  return s;
}

std::string point_string(const RationalVector& b) {
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? " " : "") + to_string(b[i]);
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json report_to_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["config"] = sweep_config_to_json(report.config);
  j["thresholds"] = {{"zero_mode", 1e-3},
                     {"bs_persistence", 5e-4},
                     {"limit_match_relative", 0.05},
                     {"gap_trend_noise", 0.10},
                     {"localization_radius", 5.0},
                     {"localization_noise", 0.20},
                     {"relative_gap", "|computed - predicted| / max(predicted, 1)"}};
  j["partial"] = report.partial();
  j["passed"] = report.passed();
  j["failures"] = report.failures;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : report.verdicts)
    j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"informational", v.informational}, {"detail", v.detail}});
  j["kernel_counts"] = nlohmann::json::array();
  for (const auto& r : report.kernel_counts)
    j["kernel_counts"].push_back({{"k", r.k}, {"s", r.s}, {"zero_modes", r.zero_modes}, {"lattice_points", r.lattice_points}});
  j["tracks"] = nlohmann::json::array();
  for (const auto& t : report.tracks) {
    nlohmann::json tj;
    tj["k"] = t.k;
    tj["b"] = rational_vector_to_json(t.b.point);
    tj["mode"] = t.mode;
    tj["limit"] = t.limit.to_json();
    tj["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows)
      tj["rows"].push_back({{"s", r.s}, {"computed", r.computed}, {"predicted", r.predicted}, {"gaps", r.gaps},
                            {"relative_gaps", r.relative_gaps}});
    tj["discretization"] = t.discretization;
    tj["extrapolated"] = t.extrapolated;
    tj["extrapolated_relative_gaps"] = t.extrapolated_relative_gaps;
    j["tracks"].push_back(tj);
  }
  j["spectra"] = nlohmann::json::array();
  for (const auto& r : report.modes)
    if (r.spectrum) j["spectra"].push_back(r.spectrum->to_json());
  return j;
}

std::string trajectory_svg(const BSTrack& track) {
  const double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
  double smin = 1e300, smax = -1e300, ymax = 0.0;
  for (const auto& r : track.rows) {
    smin = std::min(smin, r.s);
    smax = std::max(smax, r.s);
    for (double v : r.computed) ymax = std::max(ymax, v);
    for (double v : r.predicted) ymax = std::max(ymax, v);
  }
  if (track.rows.empty()) smin = smax = 1.0;
  if (smax <= smin) {
    smin /= 2.0;
    smax *= 2.0;
  }
  ymax = ymax > 0.0 ? 1.1 * ymax : 1.0;
  const double lmin = std::log10(smin), lmax = std::log10(smax);
  auto X = [&](double s) { return left + (W - left - right) * (lmax - std::log10(s)) / (lmax - lmin); };
  auto Y = [&](double v) { return H - bottom - (H - top - bottom) * v / ymax; };
  static const char* colors[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#2c3e50"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">k=" << track.k << ", b=(" << point_string(track.b.point)
     << "), mode (" << mode_string(track.mode) << ")</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n";
  for (const auto& r : track.rows) {
    os << "<text x=\"" << format_number(X(r.s)) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">"
       << format_number(r.s) << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    os << "<text x=\"" << left - 8 << "\" y=\"" << format_number(Y(v) + 4) << "\" text-anchor=\"end\">"
       << format_number(std::round(v * 1000.0) / 1000.0) << "</text>\n";
  }
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">s (log scale, decreasing)</text>\n";
  os << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" transform=\"rotate(-90 16 " << (top + H - bottom) / 2
     << ")\" text-anchor=\"middle\">dbar eigenvalue</text>\n";

  std::set<double> limits;
  for (const auto& r : track.rows)
    for (double v : r.predicted) limits.insert(v);
  for (double v : limits)
    os << "<line x1=\"" << left << "\" y1=\"" << format_number(Y(v)) << "\" x2=\"" << W - right << "\" y2=\""
       << format_number(Y(v)) << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";

  std::size_t cols = 0;
  for (const auto& r : track.rows) cols = std::max(cols, r.computed.size());
  for (std::size_t j = 0; j < cols; ++j) {
    const char* color = colors[j % 6];
    std::string pts;
    for (const auto& r : track.rows)
      if (j < r.computed.size()) pts += format_number(X(r.s)) + "," + format_number(Y(r.computed[j])) + " ";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    for (const auto& r : track.rows)
      if (j < r.computed.size())
        os << "<circle cx=\"" << format_number(X(r.s)) << "\" cy=\"" << format_number(Y(r.computed[j])) << "\" r=\"3\" fill=\""
           << color << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit_reports(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };

  emit("report.json", report_to_json(report).dump(2) + "\n");
  if (report.modes.empty()) return written;

  std::map<int, std::ostringstream> eigs;
  for (const auto& r : report.modes) {
    auto& os = eigs[r.k];
    if (os.tellp() == 0) os << "k,s,mode,bs,index,dbar_eigenvalue,residual,dofs,h\n";
    if (!r.spectrum) continue;
    const auto& sp = *r.spectrum;
    for (Eigen::Index j = 0; j < sp.dbar_eigenvalues.size(); ++j)
      os << r.k << ',' << format_number(r.s) << ',' << mode_string(r.mode) << ',' << (r.bs ? 1 : 0) << ',' << j << ','
         << format_number(sp.dbar_eigenvalues[j]) << ',' << format_number(sp.residuals[j]) << ',' << sp.dofs << ','
         << format_number(sp.h) << '\n';
  }
  for (auto& [k, os] : eigs) emit("eigs_k" + std::to_string(k) + ".csv", os.str());

  {
    std::ostringstream os;
    os << "k,mode,s,index,c_min";
    for (double c : report.config.localization_c) os << ",mass_c" << format_number(c);
    os << '\n';
    for (const auto& r : report.localization) {
      os << r.k << ',' << mode_string(r.mode) << ',' << format_number(r.s) << ',' << r.index << ',' << format_number(r.c_min);
      for (double m : r.mass) os << ',' << format_number(m);
      os << '\n';
    }
    emit("localization.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "k,s,zero_modes,lattice_points\n";
    for (const auto& r : report.kernel_counts)
      os << r.k << ',' << format_number(r.s) << ',' << r.zero_modes << ',' << r.lattice_points << '\n';
    emit("kernel_counts.csv", os.str());
  }
  for (std::size_t i = 0; i < report.tracks.size(); ++i) emit("plot_b" + std::to_string(i) + ".svg", trajectory_svg(report.tracks[i]));
  return written;
}

}  // namespace toricspec
