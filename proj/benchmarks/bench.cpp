#include <benchmark/benchmark.h>

#include "nlsgs/action_min.hpp"
#include "nlsgs/fem.hpp"
#include "nlsgs/linalg.hpp"
#include "nlsgs/mesh.hpp"
#include "nlsgs/soliton.hpp"
#include "nlsgs/starts.hpp"

using namespace nlsgs;

namespace {

TriMesh triangle_mesh(benchmark::State &state)
{
  return triangulate(builtin::equilateral(), 1.0 / static_cast<double>(state.range(0)));
}

void BM_AssembleStiffness(benchmark::State &state)
{
  const auto mesh = triangle_mesh(state);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble_stiffness(mesh));
  }
  state.counters["nodes"] = static_cast<double>(mesh.node_count());
}
BENCHMARK(BM_AssembleStiffness)->Arg(16)->Arg(32)->Arg(64);

void BM_AssembleMass(benchmark::State &state)
{
  const auto mesh = triangle_mesh(state);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble_mass(mesh, false));
  }
}
BENCHMARK(BM_AssembleMass)->Arg(16)->Arg(32)->Arg(64);

void BM_ShiftedSolve(benchmark::State &state)
{
  const auto space = FemSpace::create(triangle_mesh(state));
  const auto a = space->shifted(10.0);
  const auto b = nonlinear_load(random_positive_field(space, 1), 4.0);
  CgStats stats;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(solve_cg(a, b, 0.0, {}, &stats));
  }
  state.counters["iterations"] = stats.iterations;
}
BENCHMARK(BM_ShiftedSolve)->Arg(16)->Arg(32)->Arg(64);

void BM_NonlinearLoad(benchmark::State &state)
{
  const auto space = FemSpace::create(triangle_mesh(state));
  const auto u = random_positive_field(space, 2);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(nonlinear_load(u, 3.8));
  }
}
BENCHMARK(BM_NonlinearLoad)->Arg(16)->Arg(32)->Arg(64);

void BM_Shooting(benchmark::State &state)
{
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(shoot_soliton(4.0));
  }
}
BENCHMARK(BM_Shooting)->Unit(benchmark::kMillisecond);

void BM_ActionSolve(benchmark::State &state)
{
  const auto space = FemSpace::create(triangle_mesh(state));
  const double lambda = 10.0;
  const auto starts = default_action_starts(space, 4.0, lambda, townes_profile());
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(minimize_action(starts, lambda, 4.0));
  }
}
BENCHMARK(BM_ActionSolve)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
