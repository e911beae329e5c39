#include <benchmark/benchmark.h>

#include <cmath>

#include "osclab/assembly.hpp"
#include "osclab/linalg.hpp"
#include "osclab/semiflow.hpp"

namespace {

using namespace osclab;

// Args: mesh cells per direction, 1000 * eps (0 for the limit).
void BM_AssembleStiffness(benchmark::State& state) {
  const StructuredMesh mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const auto fam = DiffeoFamily::make(state.range(1) / 1000.0);
  const FieldQuadrature q(fam, mesh, oscillation_resolving_rule(fam, mesh));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness_adapted(q, 0.5));
  state.counters["points/elem"] = q.points_per_element();
}
BENCHMARK(BM_AssembleStiffness)->Args({32, 0})->Args({32, 100})->Args({64, 25})->Args({64, 5})
    ->Unit(benchmark::kMillisecond);

void BM_FieldQuadrature(benchmark::State& state) {
  const StructuredMesh mesh(64, 64);
  const auto fam = DiffeoFamily::make(state.range(0) / 1000.0);
  const auto rule = oscillation_resolving_rule(fam, mesh);
  for (auto _ : state) benchmark::DoNotOptimize(FieldQuadrature(fam, mesh, rule));
}
BENCHMARK(BM_FieldQuadrature)->Arg(100)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_CgResolvent(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StructuredMesh mesh(n, n);
  const auto fam = DiffeoFamily::perturbed(0.05);
  const FieldQuadrature q(fam, mesh, oscillation_resolving_rule(fam, mesh));
  const auto m = assemble_mass(q);
  const auto a = SparseOperator::combine(1.0, assemble_stiffness_adapted(q, 0.5), 1.0, m);
  const Vector b = m.apply(interpolate(mesh, [](Point p) { return p.x2; }).values);
  int iterations = 0;
  for (auto _ : state) {
    const auto r = cg_solve(a, b, {.tol = 1e-12});
    iterations = r.report.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["cg_iters"] = iterations;
}
BENCHMARK(BM_CgResolvent)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SmallestEigenpairs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StructuredMesh mesh(n, n);
  const auto fam = DiffeoFamily::perturbed(0.05);
  const FieldQuadrature q(fam, mesh, oscillation_resolving_rule(fam, mesh));
  const auto a = assemble_stiffness_adapted(q, 0.5);
  const auto m = assemble_mass(q);
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(a, m, 4));
}
BENCHMARK(BM_SmallestEigenpairs)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ImexStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StructuredMesh mesh(n, n);
  const Semiflow flow(ProblemSpec{}, DiffeoFamily::perturbed(0.05), mesh);
  NodalField u = interpolate(mesh, [](Point p) { return 0.5 + 0.2 * std::cos(3.14159 * p.x1); });
  for (auto _ : state) {
    u = flow.imex_step(u, flow.spec().dt);
    benchmark::DoNotOptimize(u.values.data());
  }
}
BENCHMARK(BM_ImexStep)->Arg(32)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
