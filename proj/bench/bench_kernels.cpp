#include <benchmark/benchmark.h>

#include "slitcap/map.hpp"
#include "slitcap/evolution.hpp"
#include "slitcap/oracle.hpp"
#include "slitcap/symmetric.hpp"

using namespace slitcap;

namespace {

const Complex I{0.0, 1.0};
const SlitConfig kRow1{I, 2.0 + I, -2.0 - I, -1.0 - I};

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_GridApply(benchmark::State& st) {
  const GridProblem p = slit_problem(kRow1, {6.0, int(st.range(0))});
  std::vector<double> u(p.fixed().size(), 1.0), out;
  for (auto _ : st) {
    p.apply(u, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["nodes"] = double(u.size());
}

void BM_GridSolve(benchmark::State& st) {
  const GridProblem p = slit_problem(kRow1, {6.0, int(st.range(0))});
  for (auto _ : st) benchmark::DoNotOptimize(grid_solve(p, exec_of(st)).capacity);
}

void BM_BoundaryTrace(benchmark::State& st) {
  const NormalizedConfig n = normalize(kRow1);
  const MapData md = make_map(integrate(initial_state(n).to_state(), n).final_state(), n);
  for (auto _ : st) benchmark::DoNotOptimize(boundary_trace(md, kRow1, int(st.range(0))).max_line_deviation);
}

}  // namespace

// second argument: 0 serial reference, 1 OpenMP
BENCHMARK(BM_GridApply)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSolve)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundaryTrace)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
