#include <benchmark/benchmark.h>

#include "pco/analysis.hpp"

namespace {

void BM_SolveSplay(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = pco::CouplingMatrix::homogeneous(n, 0.8 / static_cast<double>(n));
  const auto r = pco::PartialReset::linear(0.5);
  const auto u = pco::make_ub(-3.0);
  for (auto _ : state) benchmark::DoNotOptimize(pco::solve_splay(k, r, u));
}
BENCHMARK(BM_SolveSplay)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_JacobianAt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = pco::CouplingMatrix::homogeneous(n, 0.8 / static_cast<double>(n));
  const auto r = pco::PartialReset::linear(0.5);
  const auto u = pco::make_ub(-3.0);
  const auto sol = pco::solve_splay(k, r, u);
  for (auto _ : state) benchmark::DoNotOptimize(pco::jacobian_at(sol->state, k, r, u));
}
BENCHMARK(BM_JacobianAt)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_Classify(benchmark::State& state) {
  const auto u = pco::to_conductance_based(pco::make_qif(1.0, -1.0), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(pco::classify(u));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

void BM_BifurcationCurve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pco::bifurcation_curve(50, 0.0175, -3.0));
}
BENCHMARK(BM_BifurcationCurve)->Unit(benchmark::kMicrosecond);

}  // namespace
