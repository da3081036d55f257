#include <benchmark/benchmark.h>

#include "qdyn1d/dynamics.hpp"
#include "qdyn1d/potentials.hpp"

using namespace qdyn1d;

namespace {

LatticeOperator pd_operator(index_t L) {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = period_doubling_rule();
  return build_operator(realize(spec, {1, L}), Geometry::HalfLine, L);
}

void BM_tridiag_eigensystem(benchmark::State& state) {
  const auto L = static_cast<index_t>(state.range(0));
  const LatticeOperator op = pd_operator(L);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonalize(op));
  }
}
BENCHMARK(BM_tridiag_eigensystem)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_abel_amplitudes(benchmark::State& state) {
  const auto L = static_cast<index_t>(state.range(0));
  const LatticeOperator op = pd_operator(L);
  const EigenData eig = diagonalize(op);
  for (auto _ : state) {
    benchmark::DoNotOptimize(abel_amplitudes(eig, 50.0));
  }
}
BENCHMARK(BM_abel_amplitudes)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
