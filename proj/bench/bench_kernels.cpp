// Serial reference vs OpenMP kernels on identical inputs.

#include <benchmark/benchmark.h>

#include "riskforms/instances.hpp"

using namespace riskforms;

namespace {

TwoStageProblem bench_problem(std::size_t nx, std::size_t ny, std::size_t nu) {
  Rng rng(derive_seed(42, nx * 1000 + ny));
  std::vector<double> values(nx * ny * nu * nu);
  for (double& v : values) v = rng.uniform(-5.0, 5.0);
  std::vector<std::vector<std::vector<std::size_t>>> feasible(nx, std::vector<std::vector<std::size_t>>(nu));
  for (auto& per_x : feasible)
    for (auto& list : per_x)
      for (std::size_t u2 = 0; u2 < nu; ++u2) list.push_back(u2);
  return TwoStageProblem{nu, feasible, CostTensor(nx, ny, nu, nu, values),
                         ControlledLaw{Prior(rng.probability_vector(ny)), random_controlled_kernel(rng, nu, ny, nx)},
                         make_composite(avar_form(0.3), avar_form(0.2))};
}

void BM_solve_nested(benchmark::State& state) {
  const auto p = bench_problem(static_cast<std::size_t>(state.range(0)), 200, 8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_nested(p).value);
}

void BM_solve_nested_serial(benchmark::State& state) {
  const auto p = bench_problem(static_cast<std::size_t>(state.range(0)), 200, 8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_nested_serial(p).value);
}

// |U2|^|X| policies per u1: 4^8 = 65536
void BM_solve_flat(benchmark::State& state) {
  const auto p = bench_problem(8, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(solve_flat(p).value);
}

void BM_solve_flat_serial(benchmark::State& state) {
  const auto p = bench_problem(8, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(solve_flat_serial(p).value);
}

void BM_check_axioms(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_axioms(avar_form(0.3), static_cast<std::size_t>(state.range(0)), 1).passed());
}

void BM_check_axioms_serial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(check_axioms_serial(avar_form(0.3), static_cast<std::size_t>(state.range(0)), 1).passed());
}

void BM_conditional_operator(benchmark::State& state) {
  Rng rng(7);
  const std::size_t nx = static_cast<std::size_t>(state.range(0)), ny = 64;
  Matrix cost(nx, ny);
  for (std::size_t x = 0; x < nx; ++x) cost.set_row(x, rng.values(ny, -5.0, 5.0));
  const Kernel k = random_kernel(rng, nx, ny);
  const CompositeForm cf = make_composite(mean_form(), avar_form(0.1));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_operator(cf, cost, k));
}

void BM_conditional_operator_serial(benchmark::State& state) {
  Rng rng(7);
  const std::size_t nx = static_cast<std::size_t>(state.range(0)), ny = 64;
  Matrix cost(nx, ny);
  for (std::size_t x = 0; x < nx; ++x) cost.set_row(x, rng.values(ny, -5.0, 5.0));
  const Kernel k = random_kernel(rng, nx, ny);
  const CompositeForm cf = make_composite(mean_form(), avar_form(0.1));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_operator_serial(cf, cost, k));
}

}  // namespace

BENCHMARK(BM_solve_nested)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_solve_nested_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_solve_flat)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_solve_flat_serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_check_axioms)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_check_axioms_serial)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_conditional_operator)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_conditional_operator_serial)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
