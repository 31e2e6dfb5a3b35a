// Serial vs OpenMP sweeps, and banded vs dense diagonalization.

#include <vector>

#include <benchmark/benchmark.h>

#include "squidharm/constants.hpp"
#include "squidharm/eigen.hpp"
#include "squidharm/hamiltonian.hpp"
#include "squidharm/multimode.hpp"
#include "squidharm/observables.hpp"
#include "squidharm/spectrum.hpp"

using namespace squidharm;

namespace {

SquidParams six_micron() {
  SquidParams p;
  p.E_C = 0.0956;
  p.E_J1_L = 231.0;
  p.dE_J = asymmetry_to_dEJ(0.0033);
  p.alpha = 231.0 / (4.0 * constants::inductive_energy_ghz(10.0));
  return p;
}

std::vector<double> flux_grid(int n) {
  std::vector<double> f;
  for (int k = 0; k < n; ++k) f.push_back(0.45 + 0.1 * k / (n - 1));
  return f;
}

Execution policy(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void BM_Spectrum(benchmark::State& state) {
  SpectrumOptions o;
  o.execution = policy(state);
  o.basis = select_cutoff(six_micron(), 4);
  const auto flux = flux_grid(101);
  for (auto _ : state) benchmark::DoNotOptimize(transition_spectrum(six_micron(), flux, {0.0, 0.5}, 4, o));
}
BENCHMARK(BM_Spectrum)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DiodeScan(benchmark::State& state) {
  const auto flux = flux_grid(201);
  for (auto _ : state) benchmark::DoNotOptimize(diode_scan(six_micron(), flux, 2048, policy(state)));
}
BENCHMARK(BM_DiodeScan)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FullSquidDiscrepancy(benchmark::State& state) {
  const auto p = six_micron();
  const auto circuit = FullSquidCircuit::from_device(p.E_C, p.E_J1_L, p.E_J1_R(), 10.0, 73.0);
  MultimodeOptions o;
  o.execution = policy(state);
  o.full_dims = {4, 6, 0};
  for (auto _ : state) benchmark::DoNotOptimize(model_discrepancy(circuit, flux_grid(4), 0.0, 2, o));
}
BENCHMARK(BM_FullSquidDiscrepancy)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Eigensolve(benchmark::State& state) {
  const auto p = six_micron().with_flux(0.49);
  const ChargeBasisSpec basis{static_cast<int>(state.range(1)), false};
  const auto band = hamiltonian_band(build_squid_potential(p), p.E_C, p.n_g, basis);
  const auto dense = band.to_dense();
  for (auto _ : state) {
    if (state.range(0)) benchmark::DoNotOptimize(eigensolve(band, 6, false));
    else benchmark::DoNotOptimize(eigensolve_dense(dense, 6, false));
  }
}
BENCHMARK(BM_Eigensolve)->ArgNames({"banded", "cutoff"})->ArgsProduct({{0, 1}, {64, 256}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
