#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pco/engine.hpp"

namespace {

pco::NetworkState random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> phases(n);
  for (double& p : phases) p = unit(rng);
  pco::NetworkState s = pco::make_state(phases);
  pco::advance_to_section(s);
  return s;
}

void BM_FiringMap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = pco::CouplingMatrix::homogeneous(n, 0.8 / static_cast<double>(n));
  const auto r = pco::PartialReset::linear(0.5);
  const auto u = pco::make_ub(-3.0);
  pco::NetworkState s = random_state(n, 1);
  for (auto _ : state) {
    s = pco::firing_map(s, k, r, u).next;
    benchmark::DoNotOptimize(s.phases.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FiringMap)->Arg(10)->Arg(50)->Arg(200);

void BM_SynchronousAvalanche(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = pco::CouplingMatrix::homogeneous(n, 0.8 / static_cast<double>(n));
  const auto r = pco::PartialReset::linear(0.0);
  const auto u = pco::make_ub(-3.0);
  const pco::NetworkState s = pco::make_state(std::vector<double>(n, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(pco::firing_map(s, k, r, u));
}
BENCHMARK(BM_SynchronousAvalanche)->Arg(50)->Arg(200);

void BM_Simulate(benchmark::State& state) {
  const std::size_t n = 50;
  const auto k = pco::CouplingMatrix::homogeneous(n, 0.0175);
  const auto r = pco::PartialReset::linear(0.5);
  const auto u = pco::make_ub(-3.0);
  const pco::NetworkState s = random_state(n, 2);
  pco::SimulationOptions opt;
  opt.max_events = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pco::simulate(s, k, r, u, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
