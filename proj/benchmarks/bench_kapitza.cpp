// Copyright 2026 The kapitza-floq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "kapitza/dynamics.hpp"
#include "kapitza/emission.hpp"
#include "kapitza/floquet.hpp"
#include "kapitza/measurement.hpp"

namespace {

using namespace kapitza;

void BM_PeriodPropagator(benchmark::State& state) {
    CircuitParams c;
    c.n_max = static_cast<int>(state.range(0));
    RotorHamiltonian h = driven_rotor(c, FluxWaveform::linear());
    for (auto _ : state) benchmark::DoNotOptimize(propagate_period(h, c.period(), 1024).u_period.data());
}
BENCHMARK(BM_PeriodPropagator)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

const FloquetSolution& reference_solution() {
    static const FloquetSolution sol = [] {
        CircuitParams c;
        Propagation p = propagate_period(driven_rotor(c, FluxWaveform::linear()), c.period(), 1024);
        return label_and_gauge(floquet_modes(p, c.omega), effective_model(c, FluxWaveform::linear()));
    }();
    return sol;
}

void BM_SidebandExpansion(benchmark::State& state) {
    const FloquetSolution& sol = reference_solution();
    CMatrix n = charge_operator(CircuitParams{});
    for (auto _ : state) {
        SidebandExpansion e = sideband_coefficients(floquet_frame_operator(sol, n, 6), 64);
        benchmark::DoNotOptimize(e.coeffs.data());
    }
}
BENCHMARK(BM_SidebandExpansion)->Unit(benchmark::kMillisecond);

void BM_FloquetLindblad50ns(benchmark::State& state) {
    const FloquetSolution& sol = reference_solution();
    SidebandExpansion e = sideband_coefficients(floquet_frame_operator(sol, charge_operator(CircuitParams{}), 6), 64);
    FloquetLindblad lind(sol.quasienergies.head(6), sol.period,
                         {{1e-5, FrequencyPart(e, FrequencySign::Negative, 1e-12)}}, 16);
    CMatrix rho = CMatrix::Zero(6, 6);
    rho(0, 0) = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(lind.evolve({rho}, 0.0, 50.0).front().data());
}
BENCHMARK(BM_FloquetLindblad50ns)->Unit(benchmark::kMillisecond);

void BM_Trajectory100ns(benchmark::State& state) {
    MeasurementConfig cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.duration = 100.0;
    MeasurementModel m = measurement_model(CircuitParams{}, cfg);
    CVector psi0 = m.initial_state();
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_trajectory(m, psi0, seed++).record.data());
}
BENCHMARK(BM_Trajectory100ns)->Unit(benchmark::kMillisecond);

void BM_PowerSpectrum(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cplx> rec(static_cast<std::size_t>(state.range(0)));
    for (auto& x : rec) x = cplx(g(rng), g(rng));
    for (auto _ : state) benchmark::DoNotOptimize(power_spectrum(rec, 0.05).power.data());
}
BENCHMARK(BM_PowerSpectrum)->Arg(40000)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
