// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <memory>

#include "bhtherm/meanfield.hpp"
#include "bhtherm/qdyn.hpp"
#include "bhtherm/spectral.hpp"

using namespace bhtherm;

namespace {

void BM_SectorBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SectorBasis(n).size());
}
BENCHMARK(BM_SectorBasis)->Arg(20)->Arg(40)->Arg(70);

void BM_BuildHamiltonian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SectorBasis sector(n);
  const auto p = ModelParams::from_interaction(10.0, n, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(p, sector).matrix.nonZeros());
  state.counters["dim"] = static_cast<double>(sector.size());
}
BENCHMARK(BM_BuildHamiltonian)->Arg(20)->Arg(40)->Arg(70);

void BM_Diagonalize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SectorBasis sector(n);
  const auto h = build_hamiltonian(ModelParams::from_interaction(10.0, n, 0.1), sector);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h).values(0));
  state.counters["dim"] = static_cast<double>(sector.size());
}
BENCHMARK(BM_Diagonalize)->Arg(20)->Arg(30)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_UncoupledSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SectorBasis sector(n);
  const auto p = ModelParams::from_interaction(10.0, n, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_uncoupled(p, sector).levels.size());
}
BENCHMARK(BM_UncoupledSpectrum)->Arg(40)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_PopulationSeries(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SectorBasis sector(n);
  const auto u = diagonalize_uncoupled(ModelParams::from_interaction(10.0, n, 0.0), sector);
  const auto spec = std::make_shared<const Spectrum>(
      diagonalize(build_hamiltonian(ModelParams::from_interaction(10.0, n, 0.1), sector)));
  const auto init = prepare_initial(u, spec, 0.6, 0.3);
  std::vector<double> times(400);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = 1000.0 + 2.5 * static_cast<double>(i);
  for (auto _ : state) benchmark::DoNotOptimize(population_series(init.state, sector, times).size());
}
BENCHMARK(BM_PopulationSeries)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

ClassicalState sample_state() {
  ClassicalState s;
  s.n = {16.8, 12.6, 8.4, 4.2};
  s.phi = {0.0, 0.5, 2.0, 4.0};
  return s;
}

void BM_CartesianRhs(benchmark::State& state) {
  const auto p = ModelParams::from_interaction(10.0, 40, 0.1);
  const auto z = to_cartesian(sample_state());
  CartesianState dz;
  for (auto _ : state) {
    cartesian_rhs(z, dz, p);
    benchmark::DoNotOptimize(dz);
  }
}
BENCHMARK(BM_CartesianRhs);

void BM_IntegrateTrajectory(benchmark::State& state) {
  const auto p = ModelParams::from_interaction(10.0, 40, 0.1);
  const auto s = sample_state();
  const double t_end = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, p, t_end).steps);
}
BENCHMARK(BM_IntegrateTrajectory)->Arg(100)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SpacingRatio(benchmark::State& state) {
  std::vector<double> levels(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<double>(i) + 0.3 * ((i * 7919) % 13) / 13.0;
  for (auto _ : state) benchmark::DoNotOptimize(spacing_ratio(levels).mean());
}
BENCHMARK(BM_SpacingRatio)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
