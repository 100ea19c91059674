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

#include "toricspec/json_io.hpp"

#include <fstream>
#include <sstream>

#include "toricspec/error.hpp"

namespace toricspec {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

Integer integer_from_json(const nlohmann::json& j, const char* what) {
  const Rational q = rational_from_json(j);
  if (q.denominator() != 1) bad(std::string(what) + " must be an integer");
  return q.numerator();
}

}  // namespace

nlohmann::json rational_to_json(const Rational& q) {
  if (q.denominator() == 1) return q.numerator();
  return to_string(q);
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<Integer>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  bad("expected an integer or a \"p/q\" string, got " + j.dump());
}

nlohmann::json rational_vector_to_json(const RationalVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& q : v) out.push_back(rational_to_json(q));
  return out;
}

FacetData facets_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("polytope must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) bad("polytope needs an integer \"dim\"");
  const int n = j["dim"].get<int>();
  if (n < 1) bad("polytope dimension must be positive");
  std::vector<Facet> facets;
  if (j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    const Integer a = j.contains("scale") ? integer_from_json(j["scale"], "scale") : 1;
    for (int i = 0; i < n; ++i) {
      IntVector e(n, 0);
      e[i] = 1;
      facets.push_back({e, 0});
    }
    if (preset == "simplex") {
      facets.push_back({IntVector(n, -1), -a});
    } else if (preset == "cube") {
      for (int i = 0; i < n; ++i) {
        IntVector e(n, 0);
        e[i] = -1;
        facets.push_back({e, -a});
      }
    } else {
      bad("unknown polytope preset \"" + preset + "\"");
    }
  } else {
    if (!j.contains("facets") || !j["facets"].is_array()) bad("polytope needs a \"facets\" array");
    for (const auto& f : j["facets"]) {
      Facet facet;
      if (!f.contains("normal") || !f["normal"].is_array()) bad("facet needs a \"normal\" array");
      for (const auto& c : f["normal"]) facet.normal.push_back(integer_from_json(c, "normal entry"));
      facet.offset = f.contains("offset") ? integer_from_json(f["offset"], "offset") : 0;
      facets.push_back(std::move(facet));
    }
  }
  return {n, std::move(facets)};
}

DelzantPolytope polytope_from_json(const nlohmann::json& j) {
  const FacetData data = facets_from_json(j);
  return DelzantPolytope::from_facets(data.dim, data.facets);
}

nlohmann::json polytope_to_json(const DelzantPolytope& P) {
  const DelzantPolytope C = P.canonical();
  nlohmann::json j;
  j["dim"] = C.dim();
  j["facets"] = nlohmann::json::array();
  for (const auto& f : C.facets()) j["facets"].push_back({{"normal", f.normal}, {"offset", f.offset}});
  return j;
}

PolynomialFn polynomial_from_json(const nlohmann::json& j, int dim) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "zero") return PolynomialFn(dim);
    if (name == "half_norm_squared") return PolynomialFn::half_norm_squared(dim);
    bad("unknown polynomial \"" + name + "\"");
  }
  if (j.is_object() && j.contains("quadratic")) {
    const auto& rows = j["quadratic"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) bad("quadratic must be a dim x dim array");
    Eigen::MatrixXd A(dim, dim);
    for (int r = 0; r < dim; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != dim) bad("quadratic must be a dim x dim array");
      for (int c = 0; c < dim; ++c) A(r, c) = rows[r][c].get<double>();
    }
    if (!A.isApprox(A.transpose())) bad("quadratic matrix must be symmetric");
    return PolynomialFn::quadratic(A);
  }
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("terms")) bad("polynomial object needs \"terms\" or \"quadratic\"");
    list = &j["terms"];
  }
  if (!list->is_array()) bad("polynomial must be a name, a term list or an object");
  std::vector<PolynomialFn::Term> terms;
  for (const auto& t : *list) {
    if (!t.is_object() || !t.contains("alpha")) bad("term needs \"alpha\"");
    PolynomialFn::Term term;
    term.alpha = t["alpha"].get<std::vector<int>>();
    if (t.contains("c")) term.coeff = t["c"].get<double>();
    else if (t.contains("coeff")) term.coeff = t["coeff"].get<double>();
    else bad("term needs a coefficient \"c\"");
    if (static_cast<int>(term.alpha.size()) != dim) bad("term exponent has wrong length");
    for (int a : term.alpha)
      if (a < 0) bad("term exponents must be nonnegative");
    terms.push_back(std::move(term));
  }
  return PolynomialFn(dim, std::move(terms));
}

nlohmann::json polynomial_to_json(const PolynomialFn& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"alpha", t.alpha}, {"c", t.coeff}});
  return terms;
}

PotentialSpec potential_from_json(const nlohmann::json& j, const DelzantPolytope& P) {
  PotentialSpec spec = PotentialSpec::standard(P);
  if (j.is_null()) return spec;
  if (!j.is_object()) bad("potential must be a JSON object");
  if (j.contains("phi")) spec.phi = polynomial_from_json(j["phi"], P.dim());
  if (j.contains("psi")) spec.psi = polynomial_from_json(j["psi"], P.dim());
  if (j.contains("guillemin_scale")) {
    spec.guillemin_scale = j["guillemin_scale"].get<double>();
    if (!(spec.guillemin_scale > 0.0)) bad("guillemin_scale must be positive");
  }
  return spec;
}

nlohmann::json potential_to_json(const PotentialSpec& spec) {
  return {{"phi", polynomial_to_json(spec.phi)},
          {"psi", polynomial_to_json(spec.psi)},
          {"guillemin_scale", spec.guillemin_scale}};
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

nlohmann::json resolve_json(const nlohmann::json& value, const std::filesystem::path& base_dir) {
  if (value.is_string()) {
    std::filesystem::path p = value.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_json(p);
  }
  return value;
}

}  // namespace toricspec
