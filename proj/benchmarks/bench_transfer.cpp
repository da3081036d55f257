#include <benchmark/benchmark.h>

#include "qdyn1d/potentials.hpp"
#include "qdyn1d/tracemap.hpp"
#include "qdyn1d/transfer.hpp"

using namespace qdyn1d;

namespace {

PotentialSamples pd(index_t n) {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = period_doubling_rule();
  return realize(spec, {0, n});
}

void BM_transfer_product(benchmark::State& state) {
  const auto n = static_cast<index_t>(state.range(0));
  const PotentialSamples v = pd(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_product(v, n, 0, 0.0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_transfer_product)->Range(1 << 10, 1 << 18);

void BM_growth_profile(benchmark::State& state) {
  const auto n = static_cast<index_t>(state.range(0));
  const PotentialSamples v = pd(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(growth_profile(v, 0.0, n));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_growth_profile)->Range(1 << 12, 1 << 16);

void BM_trace_orbit(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_orbit(0.731, 1.0, 3.0, m));
  }
}
BENCHMARK(BM_trace_orbit)->Arg(16)->Arg(24)->Arg(32);

void BM_gap_edges(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gap_edge_energies(m, 1.0, 1.0));
  }
}
BENCHMARK(BM_gap_edges)->Arg(3)->Arg(5)->Arg(6);

}  // namespace
