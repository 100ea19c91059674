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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "toricspec/curvature.hpp"
#include "toricspec/error.hpp"
#include "toricspec/json_io.hpp"
#include "toricspec/limit.hpp"
#include "toricspec/report.hpp"
#include "toricspec/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace toricspec;

namespace {

enum Exit { kPass = 0, kVerdict = 1, kInput = 2, kSolver = 3 };

// Inline JSON if it looks like JSON, otherwise a file path.
json json_arg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[' || text[first] == '"')) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidInput, std::string("bad inline JSON: ") + e.what());
    }
  }
  return load_json(text);
}

IntVector parse_mode(const std::string& text) {
  IntVector m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      m.push_back(std::stoll(item, &used));
      if (item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "mode entries must be integers: '" + text + "'");
    }
  }
  return m;
}

// [1, 0] or "1,0"
std::string mode_text(const json& j) {
  if (!j.is_array()) return j.get<std::string>();
  std::string m;
  for (const auto& v : j) m += (m.empty() ? "" : ",") + std::to_string(v.get<long long>());
  return m;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f || !(f << text)) throw Error(ErrorCode::IoFailure, "cannot write " + out);
}

// Shared inputs of the single-shot verbs; a --config file overrides whatever came from flags.
struct Inputs {
  std::string config;
  std::string polytope;
  std::string potential;
  std::string out;

  void apply(const json& cfg) {
    if (cfg.contains("polytope")) polytope = cfg["polytope"].is_string() ? cfg["polytope"].get<std::string>() : cfg["polytope"].dump();
    if (cfg.contains("potential"))
      potential = cfg["potential"].is_string() ? cfg["potential"].get<std::string>() : cfg["potential"].dump();
    if (cfg.contains("out")) out = cfg["out"].get<std::string>();
  }
  DelzantPolytope load_polytope() const {
    if (polytope.empty()) throw Error(ErrorCode::InvalidInput, "--polytope is required");
    return polytope_from_json(json_arg(polytope));
  }
  PotentialSpec load_spec() const {
    const DelzantPolytope P = load_polytope();
    return potential.empty() ? PotentialSpec::standard(P) : potential_from_json(json_arg(potential), P);
  }
};

json load_config(const std::string& path) { return path.empty() ? json::object() : load_json(path); }

template <class T>
void override(const json& cfg, const char* key, T& value) {
  if (cfg.contains(key)) value = cfg[key].get<T>();
}

int run_check(const Inputs& in) {
  if (in.polytope.empty()) throw Error(ErrorCode::InvalidInput, "--polytope is required");
  const FacetData data = facets_from_json(json_arg(in.polytope));
  const DelzantValidation v = validate_delzant(data.dim, data.facets);
  json j;
  j["delzant"] = v.ok();
  j["violations"] = json::array();
  for (const auto& x : v.violations)
    j["violations"].push_back({{"kind", std::string(to_string(x.kind))}, {"index", x.index}, {"detail", x.detail}});
  if (v.ok()) {
    const DelzantPolytope& P = *v.polytope;
    j["polytope"] = polytope_to_json(P);
    j["vertices"] = json::array();
    for (const auto& p : P.vertices()) j["vertices"].push_back(rational_vector_to_json(p));
    if (P.dim() <= 3) {
      j["faces"] = json::array();
      for (const auto& f : vertices_and_faces(P))
        j["faces"].push_back({{"codim", f.codim}, {"active", f.active}, {"point", rational_vector_to_json(f.point)}});
    }
  }
  emit(j, in.out);
  return v.ok() ? kPass : kVerdict;
}

int run_bs(const Inputs& in, int k, bool holonomy) {
  const DelzantPolytope P = in.load_polytope();
  json j = json::array();
  for (const auto& b : bs_points(P, k)) {
    json e{{"point", rational_vector_to_json(b.point)},
           {"level", b.level},
           {"strict_level", b.strict_level},
           {"face_codim", b.face_codim}};
    if (holonomy) {
      json h = json::array();
      for (const auto& z : fiber_holonomy(P, b.point, k)) h.push_back({z.real(), z.imag()});
      e["holonomy"] = h;
    }
    j.push_back(e);
  }
  emit(j, in.out);
  return kPass;
}

struct ScanArgs {
  std::string model_A;
  int model_m = -1;
  std::vector<double> s_values{1.0, 0.1, 0.01};
  int points = 41;
  std::vector<double> z_cap;  // per active axis, ≤ 0 means uncapped
  double z_min = 1e-3, z_max = 1e3;
  std::string expect;  // bounded | unbounded
  std::string csv;
};

int run_ricci_scan(const Inputs& in, const ScanArgs& a) {
  ScanSummary summary;
  if (!a.model_A.empty()) {
    const json A = json_arg(a.model_A);
    if (!A.is_array() || A.empty()) throw Error(ErrorCode::InvalidInput, "--model-A must be a square matrix");
    ModelSpec model;
    model.n = static_cast<int>(A.size());
    model.m = a.model_m < 0 ? model.n : a.model_m;
    model.A.resize(model.n, model.n);
    for (int i = 0; i < model.n; ++i) {
      if (!A[i].is_array() || static_cast<int>(A[i].size()) != model.n)
        throw Error(ErrorCode::InvalidInput, "--model-A must be a square matrix");
      for (int c = 0; c < model.n; ++c) model.A(i, c) = A[i][c].get<double>();
    }
    ModelScanRegion region;
    region.points_per_axis = a.points;
    region.z_min = a.z_min;
    region.z_max = a.z_max;
    region.z_cap.assign(model.m, std::nullopt);
    for (std::size_t i = 0; i < a.z_cap.size() && i < region.z_cap.size(); ++i)
      if (a.z_cap[i] > 0) region.z_cap[i] = a.z_cap[i];
    summary = ricci_lower_bound_scan(model, a.s_values, region);
  } else {
    SpecScanRegion region;
    region.points_per_axis = a.points;
    summary = ricci_lower_bound_scan(in.load_spec(), a.s_values, region);
  }
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f || !(f << summary.to_csv())) throw Error(ErrorCode::IoFailure, "cannot write " + a.csv);
  }
  json j = json::parse(summary.summary_json());
  j["bounded_below"] = summary.bounded_below();
  j["decreasing_without_bound"] = summary.decreasing_without_bound();
  emit(j, in.out);
  if (a.expect == "bounded") return summary.bounded_below() ? kPass : kVerdict;
  if (a.expect == "unbounded") return summary.decreasing_without_bound() ? kPass : kVerdict;
  return kPass;
}

struct SpectrumArgs {
  double s = 0.1;
  int k = 1;
  std::string mode = "0";
  int count = 3;
  double h = 0.0;  // 0: the sweep's √s rule
};

int run_spectrum(const Inputs& in, const SpectrumArgs& a) {
  const PotentialSpec spec = in.load_spec();
  const IntVector mode = parse_mode(a.mode);
  if (static_cast<int>(mode.size()) != spec.dim()) throw Error(ErrorCode::InvalidInput, "mode length differs from dim");
  if (a.s <= 0.0 || a.k < 1 || a.count < 1) throw Error(ErrorCode::InvalidInput, "need s > 0, k >= 1, count >= 1");
  const double h = a.h > 0.0 ? a.h : MeshSchedule{}.h(a.s, spec.dim());
  auto mesh = std::make_shared<const Mesh>(build_mesh(spec.polytope, h));
  const DbarSpectrum sp = dbar_spectrum(assemble(spec, a.s, a.k, mode, mesh), a.count);
  json j = sp.to_json();
  j["bs"] = is_bs_mode(spec.polytope, a.k, mode);
  emit(j, in.out);
  return kPass;
}

int run_limit(const Inputs& in, int k, int count) {
  const PotentialSpec spec = in.load_spec();
  if (k < 1 || count < 1) throw Error(ErrorCode::InvalidInput, "need k >= 1, count >= 1");
  json j = json::array();
  for (const auto& [b, lim] : predicted_limit(spec, k, count)) {
    const ConeModel cone = cone_at(spec, b);
    json e = lim.to_json();
    e["face_codim"] = b.face_codim;
    e["separable"] = is_separable(cone);
    if (cone.codim == 2 && spec.dim() == 2) e["wedge_angle"] = wedge_angle(cone);
    e["lowest"] = lim.expanded(count);
    j.push_back(e);
  }
  emit(j, in.out);
  return kPass;
}

int run_sweep_verb(const std::string& config_path, const std::string& out, int workers) {
  if (config_path.empty()) throw Error(ErrorCode::InvalidInput, "--config is required");
  const json cfg = load_json(config_path);
  SweepConfig config = sweep_config_from_json(cfg, fs::path(config_path).parent_path());
  if (!cfg.contains("output") && !out.empty()) config.output = out;
  if (!cfg.contains("workers") && workers > 0) config.workers = workers;
  config.validate();
  const ConvergenceReport report = run_sweep(config);
  for (const auto& path : emit_reports(report, config.output)) std::cerr << "wrote " << path.string() << "\n";
  for (const auto& v : report.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << (v.informational ? " (informational)" : "")
              << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
  for (const auto& f : report.failures) std::cout << "SOLVER " << f << "\n";
  if (report.partial()) return kSolver;
  return report.passed() ? kPass : kVerdict;
}

int run_report(const std::string& input) {
  if (input.empty()) throw Error(ErrorCode::InvalidInput, "--input is required");
  const fs::path path = fs::is_directory(input) ? fs::path(input) / "report.json" : fs::path(input);
  const json j = load_json(path);
  if (!j.contains("verdicts")) throw Error(ErrorCode::InvalidInput, path.string() + " is not a sweep report");
  bool pass = true;
  for (const auto& v : j["verdicts"]) {
    const bool informational = v.value("informational", false);
    std::cout << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << v["name"].get<std::string>()
              << (informational ? " (informational)" : "") << "\n";
    if (!informational && !v["pass"].get<bool>()) pass = false;
  }
  for (const auto& t : j.value("tracks", json::array())) {
    std::cout << "k=" << t["k"] << " b=" << t["b"].dump() << "\n";
    for (const auto& r : t["rows"]) {
      std::cout << "  s=" << format_number(r["s"].get<double>());
      for (std::size_t i = 0; i < r["computed"].size(); ++i)
        std::cout << "  " << format_number(r["computed"][i].get<double>()) << " ("
                  << format_number(r["predicted"][i].get<double>()) << ")";
      std::cout << "\n";
    }
  }
  if (j.value("partial", false)) return kSolver;
  return pass ? kPass : kVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toricspec: spectra of degenerating toric Kaehler metrics"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  Inputs in;
  auto add_inputs = [&](CLI::App* sub, bool potential) {
    sub->add_option("--config", in.config, "JSON file whose keys override flags");
    sub->add_option("--polytope", in.polytope, "polytope JSON file or inline JSON");
    if (potential) sub->add_option("--potential", in.potential, "potential JSON file or inline JSON");
    sub->add_option("--out", in.out, "output file (default stdout)");
  };

  auto* check = app.add_subcommand("check", "validate a polytope and list its faces");
  add_inputs(check, false);

  int k = 1;
  bool holonomy = false;
  auto* bs = app.add_subcommand("bs", "lattice points of P at level k");
  add_inputs(bs, false);
  bs->add_option("--k", k, "level")->check(CLI::PositiveNumber);
  bs->add_flag("--holonomy", holonomy, "include fiber holonomies");

  ScanArgs scan;
  auto* ricci = app.add_subcommand("ricci-scan", "Ricci lower-bound scan over s");
  add_inputs(ricci, true);
  ricci->add_option("--model-A", scan.model_A, "scan the corner model with this matrix instead of a polytope");
  ricci->add_option("--model-m", scan.model_m, "active axes of the model (default n)");
  ricci->add_option("--s", scan.s_values, "s values, descending");
  ricci->add_option("--points", scan.points, "grid points per axis");
  ricci->add_option("--z-cap", scan.z_cap, "cap on z per active axis (model scan; <= 0 uncapped)");
  ricci->add_option("--z-min", scan.z_min);
  ricci->add_option("--z-max", scan.z_max);
  ricci->add_option("--expect", scan.expect, "bounded or unbounded; sets the exit code")
      ->check(CLI::IsMember({"bounded", "unbounded"}));
  ricci->add_option("--csv", scan.csv, "write every scanned point");

  SpectrumArgs spec_args;
  auto* spectrum = app.add_subcommand("spectrum", "lowest dbar eigenvalues of one Fourier mode");
  add_inputs(spectrum, true);
  spectrum->add_option("--s", spec_args.s);
  spectrum->add_option("--k", spec_args.k);
  spectrum->add_option("--mode", spec_args.mode, "comma separated integers");
  spectrum->add_option("--count", spec_args.count);
  spectrum->add_option("--h", spec_args.h, "mesh size (default max(sqrt(s)/40, floor))");

  int count = 6;
  auto* limit = app.add_subcommand("limit", "predicted limit spectra at every lattice point");
  add_inputs(limit, true);
  limit->add_option("--k", k);
  limit->add_option("--count", count);

  std::string sweep_out;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "s-sweep with convergence verdicts and reports");
  sweep->add_option("--config", in.config, "sweep JSON")->required();
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--workers", workers, "concurrent solves")->check(CLI::PositiveNumber);

  std::string report_input;
  auto* report = app.add_subcommand("report", "summarize an emitted report.json");
  report->add_option("--input", report_input, "report.json or its directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInput;
  }

  try {
    if (sweep->parsed()) return run_sweep_verb(in.config, sweep_out, workers);
    if (report->parsed()) return run_report(report_input);

    const json cfg = load_config(in.config);
    in.apply(cfg);
    override(cfg, "k", k);
    if (check->parsed()) return run_check(in);
    if (bs->parsed()) {
      override(cfg, "holonomy", holonomy);
      return run_bs(in, k, holonomy);
    }
    if (ricci->parsed()) {
      if (cfg.contains("model_A")) scan.model_A = cfg["model_A"].dump();
      override(cfg, "model_m", scan.model_m);
      override(cfg, "s", scan.s_values);
      override(cfg, "points", scan.points);
      override(cfg, "z_cap", scan.z_cap);
      override(cfg, "z_min", scan.z_min);
      override(cfg, "z_max", scan.z_max);
      override(cfg, "expect", scan.expect);
      override(cfg, "csv", scan.csv);
      return run_ricci_scan(in, scan);
    }
    if (spectrum->parsed()) {
      override(cfg, "s", spec_args.s);
      override(cfg, "k", spec_args.k);
      if (cfg.contains("mode")) spec_args.mode = mode_text(cfg["mode"]);
      override(cfg, "count", spec_args.count);
      override(cfg, "h", spec_args.h);
      return run_spectrum(in, spec_args);
    }
    if (limit->parsed()) {
      override(cfg, "count", count);
      return run_limit(in, k, count);
    }
  } catch (const Error& e) {
    std::cerr << "toricspec: " << e.what() << "\n";
    return e.is_solver_failure() ? kSolver : kInput;
  } catch (const json::exception& e) {
    std::cerr << "toricspec: bad JSON: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
