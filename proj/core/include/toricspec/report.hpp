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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toricspec/sweep.hpp"

namespace toricspec {

nlohmann::json report_to_json(const ConvergenceReport& report);

// report.json, eigs_k{K}.csv, localization.csv, kernel_counts.csv, plot_b{i}.svg. Returns the files written.
std::vector<std::filesystem::path> emit_reports(const ConvergenceReport& report, const std::filesystem::path& dir);

// Eigenvalue trajectories against s (log axis) with dashed predicted-limit lines.
std::string trajectory_svg(const BSTrack& track);

// printf("%.10g")
std::string format_number(double v);

}  // namespace toricspec
