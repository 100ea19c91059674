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

#include <nlohmann/json.hpp>

#include "toricspec/potential.hpp"

namespace toricspec {

// {"dim": n, "facets": [{"normal": [..], "offset": λ}, ..]} or {"preset": "simplex"|"cube", "dim": n, "scale": a}.
// Offsets may be integers or "p/q" strings that reduce to integers.
DelzantPolytope polytope_from_json(const nlohmann::json& j);
// Same schema, without the Delzant validation.
struct FacetData {
  int dim = 0;
  std::vector<Facet> facets;
};
FacetData facets_from_json(const nlohmann::json& j);
nlohmann::json polytope_to_json(const DelzantPolytope& P);  // facets in canonical order

// Polynomials: "zero", "half_norm_squared", {"quadratic": [[..], ..]}, or a term list [{"alpha": [..], "c": ..}, ..]
// (also accepted wrapped as {"terms": [..]}, with "coeff" for "c"). Serialized as a term list.
PolynomialFn polynomial_from_json(const nlohmann::json& j, int dim);
nlohmann::json polynomial_to_json(const PolynomialFn& p);

// {"phi": .., "psi": .., "guillemin_scale": c}; missing keys default to φ = 0, ψ = ½‖x‖², c = 1.
PotentialSpec potential_from_json(const nlohmann::json& j, const DelzantPolytope& P);
nlohmann::json potential_to_json(const PotentialSpec& spec);

nlohmann::json rational_to_json(const Rational& q);  // integer when integral, else "p/q"
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json rational_vector_to_json(const RationalVector& v);

// Reads a file, or returns the value itself when it is already an object or array.
nlohmann::json load_json(const std::filesystem::path& path);
nlohmann::json resolve_json(const nlohmann::json& value, const std::filesystem::path& base_dir);

}  // namespace toricspec
