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

#include <benchmark/benchmark.h>

#include <memory>

#include "toricspec/curvature.hpp"
#include "toricspec/limit.hpp"
#include "toricspec/reduced_operator.hpp"

using namespace toricspec;

namespace {

DelzantPolytope segment() { return DelzantPolytope::from_facets(1, {{{1}, 0}, {{-1}, -1}}); }
DelzantPolytope simplex() { return DelzantPolytope::from_facets(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -1}}); }

void BM_LatticePoints(benchmark::State& state) {
  const DelzantPolytope P = DelzantPolytope::from_facets(2, {{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -3}});
  for (auto _ : state) benchmark::DoNotOptimize(bs_points(P, state.range(0)));
}
BENCHMARK(BM_LatticePoints)->Arg(4)->Arg(16)->Arg(64);

void BM_FamilyHessian(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(simplex());
  const Eigen::Vector2d x(0.2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(family_hessian(spec, 0.1, x));
}
BENCHMARK(BM_FamilyHessian);

void BM_RicciGeneral(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(simplex());
  const Eigen::Vector2d x(0.2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(ricci_general(spec, 0.1, x));
}
BENCHMARK(BM_RicciGeneral);

void BM_Assemble1D(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(segment());
  const auto mesh = std::make_shared<const Mesh>(build_mesh(spec.polytope, 1.0 / state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, 0.1, 1, {0}, mesh));
  state.counters["dofs"] = mesh->node_count();
}
BENCHMARK(BM_Assemble1D)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMicrosecond);

void BM_Assemble2D(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(simplex());
  const auto mesh = std::make_shared<const Mesh>(build_mesh(spec.polytope, 1.0 / state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, 0.1, 1, {0, 0}, mesh));
  state.counters["dofs"] = mesh->node_count();
}
BENCHMARK(BM_Assemble2D)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

// Dense path below the threshold, shift-invert Krylov above it.
void BM_DbarSpectrum1D(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(segment());
  const auto mesh = std::make_shared<const Mesh>(build_mesh(spec.polytope, 1.0 / state.range(0)));
  const ReducedOperator op = assemble(spec, 0.1, 1, {0}, mesh);
  for (auto _ : state) benchmark::DoNotOptimize(dbar_spectrum(op, 3));
  state.counters["dofs"] = op.dofs();
}
BENCHMARK(BM_DbarSpectrum1D)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_DbarSpectrum2D(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(simplex());
  const auto mesh = std::make_shared<const Mesh>(build_mesh(spec.polytope, 1.0 / state.range(0)));
  const ReducedOperator op = assemble(spec, 0.1, 1, {0, 0}, mesh);
  for (auto _ : state) benchmark::DoNotOptimize(dbar_spectrum(op, 3));
  state.counters["dofs"] = op.dofs();
}
BENCHMARK(BM_DbarSpectrum2D)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ConeSpectrum(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::standard(state.range(0) == 1 ? segment() : simplex());
  const ConeModel cone = cone_at(spec, bs_points(spec.polytope, 1).front());
  for (auto _ : state) benchmark::DoNotOptimize(numeric_cone_spectrum(cone, 1, 6));
}
BENCHMARK(BM_ConeSpectrum)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
