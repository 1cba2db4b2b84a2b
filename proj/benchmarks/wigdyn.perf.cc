// Copyright 2026 The wigdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <complex>

#include "benchmark/benchmark.h"
#include "wigdyn/analytic_wigner.h"
#include "wigdyn/classical_dynamics.h"
#include "wigdyn/gaussian_frame.h"
#include "wigdyn/reference_solver.h"
#include "wigdyn/special_functions.h"

using namespace wigdyn;

static void airy_ai_complex(benchmark::State &state) {
    std::complex<double> z(-3.7, 2.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(airy_ai(z));
        z += std::complex<double>(1e-9, 0);
    }
}
BENCHMARK(airy_ai_complex);

static void gauss_airy(benchmark::State &state) {
    double c1 = -2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gauss_airy_integral(0.8, 1.3, c1));
        c1 += 1e-9;
    }
}
BENCHMARK(gauss_airy);

static void segment1_grid(benchmark::State &state) {
    size_t n = (size_t)state.range(0);
    GridWindow w{-8, 8, n, -40, 8, n};
    CubicPhaseParams q{0.6, 0.01, 0.2, 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic_wigner_segment1(w, q));
    }
    state.SetItemsProcessed((int64_t)(state.iterations() * n * n));
}
BENCHMARK(segment1_grid)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void desk_frames(benchmark::State &state) {
    PotentialModel u = PotentialModel::double_well(1000);
    FreqRatio r = FreqRatio::from_trap_over_potential(100);
    double tau_end = 2 * double_well_exact_tau_max(1000, 100);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_frames(u, r, {100, 0}, tau_end, FrameOptions{}));
    }
}
BENCHMARK(desk_frames)->Unit(benchmark::kMillisecond);

static void split_operator_steps(benchmark::State &state) {
    size_t n = (size_t)state.range(0);
    PotentialModel u = PotentialModel::double_well(1000);
    FreqRatio r = FreqRatio::from_trap_over_potential(100);
    SpatialGrid g = SpatialGrid::span(-1981, 1981, n);
    WaveFunction psi = coherent_state(g, {100, 0});
    EvolveOptions ev;
    ev.dtau = 1e-3;
    ev.moment_times = {0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(split_operator_evolve(u, r, psi, ev));
    }
    // One hundred steps per iteration.
    state.SetItemsProcessed((int64_t)(state.iterations() * 100));
}
BENCHMARK(split_operator_steps)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);

static void wigner_of_a_packet(benchmark::State &state) {
    SpatialGrid g = SpatialGrid::span(-64, 64, 4096);
    WaveFunction psi = coherent_state(g, {3, -1});
    GridWindow w{-6, 6, 128, -6, 6, 128};
    for (auto _ : state) {
        benchmark::DoNotOptimize(wigner_transform(psi, w, {3, -1}, FrameTag::Centroid));
    }
}
BENCHMARK(wigner_of_a_packet)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
