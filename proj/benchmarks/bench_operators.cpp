// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "spinbdg/bdg_operator.hpp"
#include "spinbdg/ground_state.hpp"
#include "spinbdg/lrep_solver.hpp"
#include "spinbdg/nullspace.hpp"

using namespace spinbdg;

namespace
{

// Loose ground states are enough here; only the cost matters.
GroundState ferro(int dim, int points)
{
  ModelParams params;
  params.beta_n = 885.4;
  params.beta_s = -4.1;
  GroundStateOptions o;
  o.tol = 1e-6;
  return solve_ground_state(params, Potential::make_harmonic(SpectralGrid::create(dim, 16.0, points), params.gamma), o);
}

void BM_Fft(benchmark::State &state)
{
  auto grid = SpectralGrid::create(1, 16.0, static_cast<int>(state.range(0)));
  SpinorField f = random_real_field(grid, 7);
  for (auto _ : state) {
    grid->fft_forward(f.component(0));
    grid->fft_backward(f.component(0));
    benchmark::ClobberMemory();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oNLogN);

void BM_EvenMultiplier(benchmark::State &state)
{
  auto grid = SpectralGrid::create(1, 16.0, static_cast<int>(state.range(0)));
  SpinorField f = random_real_field(grid, 7);
  for (auto _ : state) {
    grid->apply_even_multiplier(f.component(0), grid->kinetic_symbol());
    benchmark::ClobberMemory();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvenMultiplier)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oNLogN);

void BM_ApplyHPlus1D(benchmark::State &state)
{
  GroundState gs = ferro(1, static_cast<int>(state.range(0)));
  BdGOperator op(gs);
  SpinorField in = random_real_field(gs.grid(), 3);
  SpinorField out(gs.grid());
  for (auto _ : state) {
    op.apply(Block::plus, in, out);
    benchmark::ClobberMemory();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyHPlus1D)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oNLogN);

void BM_ApplyHMinus2D(benchmark::State &state)
{
  GroundState gs = ferro(2, static_cast<int>(state.range(0)));
  BdGOperator op(gs);
  SpinorField in = random_real_field(gs.grid(), 3);
  SpinorField out(gs.grid());
  for (auto _ : state) {
    op.apply(Block::minus, in, out);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ApplyHMinus2D)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_DeflatedPcg(benchmark::State &state)
{
  GroundState gs = ferro(1, static_cast<int>(state.range(0)));
  BdGOperator op(gs);
  DeflationSpace space = analytic_nullspace(gs);
  SpinorField rhs = random_real_field(gs.grid(), 11);
  for (auto _ : state) {
    PcgResult r = deflated_pcg(op.handle(Block::plus), rhs, space.null_plus, 0.0, 1e-8, 500);
    benchmark::DoNotOptimize(r.iterations);
  }
}
BENCHMARK(BM_DeflatedPcg)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
