#include <benchmark/benchmark.h>

#include <cmath>

#include "nodal/solver.hpp"

using namespace nodal;

namespace {

DiscreteFunction two_arch(const Mesh& mesh) {
  const double pi = std::acos(-1.0);
  Eigen::VectorXd values(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    values(v) = std::sin(2.0 * pi * mesh.vertices(v, 0));
    if (mesh.dim == 2) values(v) *= std::sin(pi * mesh.vertices(v, 1));
  }
  return DiscreteFunction::from_values(mesh, values);
}

Nonlinearity model() { return Nonlinearity(3.0, 4.0, 1.0, 1.0); }

}  // namespace

static void BM_Energy(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  const EnergyFunctional functional(mesh, model());
  const DiscreteFunction v = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(functional.value(0.1, v));
  state.SetItemsProcessed(state.iterations() * mesh.element_count());
}
BENCHMARK(BM_Energy)->Arg(256)->Arg(4096);

static void BM_Gradient(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  const EnergyFunctional functional(mesh, model());
  const DiscreteFunction v = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(functional.gradient(0.1, v));
  state.SetItemsProcessed(state.iterations() * mesh.element_count());
}
BENCHMARK(BM_Gradient)->Arg(256)->Arg(4096);

static void BM_Hessian(benchmark::State& state) {
  const Mesh mesh = build_rect_mesh(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(0)), 1.0, 1.0);
  const EnergyFunctional functional(mesh, model());
  const DiscreteFunction v = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(functional.hessian(0.1, v));
  state.SetItemsProcessed(state.iterations() * mesh.element_count());
}
BENCHMARK(BM_Hessian)->Arg(8)->Arg(16);

static void BM_ProjectRay(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  const EnergyFunctional functional(mesh, model());
  const DiscreteFunction v = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(project_ray(functional, 0.1, v).tau);
}
BENCHMARK(BM_ProjectRay)->Arg(256)->Arg(4096);

static void BM_ProjectNodal(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  const EnergyFunctional functional(mesh, model());
  const DiscreteFunction v = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(project_nodal(functional, 0.1, v).energy);
}
BENCHMARK(BM_ProjectNodal)->Arg(256)->Arg(4096);

static void BM_Lambda1p(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_1p(mesh, 3.0).lambda);
}
BENCHMARK(BM_Lambda1p)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MinimizeNodal(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)), 0.0, 1.0);
  const EnergyFunctional functional(mesh, Nonlinearity(3.0, 4.0, 0.0, 1.0));
  const DiscreteFunction start = two_arch(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_nodal(functional, 0.1, start).energy);
}
BENCHMARK(BM_MinimizeNodal)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
