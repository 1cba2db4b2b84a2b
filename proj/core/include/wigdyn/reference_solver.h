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

#ifndef WIGDYN_REFERENCE_SOLVER_H
#define WIGDYN_REFERENCE_SOLVER_H

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "wigdyn/decoherence.h"
#include "wigdyn/phase_space.h"
#include "wigdyn/potential.h"
#include "wigdyn/wigner_grid.h"

namespace wigdyn {

/// Uniform periodic position grid. With [x, p] = 2i the grid resolves
/// momenta up to |p| = 2 pi / dx.
struct SpatialGrid {
    double x_min = 0;
    double dx = 1;
    size_t n = 0;

    double x(size_t i) const {
        return x_min + dx * (double)i;
    }
    double x_max() const {
        return x(n - 1);
    }
    double p_max() const;
    static SpatialGrid span(double lo, double hi, size_t n);
};

/// Grid for the quartic double well started at rest from x_s: symmetric,
/// 20% beyond the outer turning point of the energy reached by a ten-sigma
/// momentum fluctuation, resolving twice the largest classical momentum plus
/// ten zero-point widths.
SpatialGrid suggest_double_well_grid(double d, double x_s, FreqRatio ratio, double n_bar);

struct WaveFunction {
    SpatialGrid grid;
    std::vector<std::complex<double>> psi;
    /// sum |psi|^2 dx.
    double norm() const;
};

/// Displaced vacuum: unit variances, mean `mean`.
WaveFunction coherent_state(const SpatialGrid &grid, PhasePoint mean);

/// Raw (non-central) first and second moments; xp is the symmetrised
/// product.
struct RawMoments {
    double x = 0, p = 0, xx = 0, xp = 0, pp = 0;

    GaussianMoments central() const;
    RawMoments operator+(const RawMoments &o) const;
    RawMoments operator*(double s) const;
};

RawMoments measure_moments(const WaveFunction &wf);

struct EvolveOptions {
    double dtau = 1e-3;
    /// Times at which moments are recorded (sorted, >= 0).
    std::vector<double> moment_times;
    /// Times at which the wavefunction is kept (subset of any times).
    std::vector<double> state_times;
    /// Tail mass allowed in the outer 5% of the grid.
    double overflow_tail = 1e-10;
    size_t overflow_check_every = 50;
};

struct NoiseSettings {
    DecoherenceParams params;
    uint64_t seed = 0;
};

struct EvolveResult {
    std::vector<double> moment_times;
    std::vector<RawMoments> moments;
    std::vector<double> state_times;
    std::vector<WaveFunction> states;
};

/// Strang splitting: half kinetic step, full potential step with the noise
/// frozen over the step, half kinetic step (adjacent half steps fused).
///
/// Noise, per step of length h, with s_i = S_i omega_t:
///   potential phase exp(-i h [U (1 + z2) - z1 U'] / (2 r)),
///   z_i ~ N(0, 2 pi (s_i / r) / h),
/// and localisation as a random linear potential exp(-i sqrt(r gamma_loc) dW x),
/// dW ~ N(0, h), which makes C_pp grow at 4 r gamma_loc per unit tau.
///
/// Throws StepAccuracy when the norm drifts by more than 1e-8 per step and
/// GridOverflow when the packet reaches the grid edge.
EvolveResult split_operator_evolve(
    const PotentialModel &model,
    FreqRatio ratio,
    WaveFunction psi0,
    const EvolveOptions &options,
    const std::optional<NoiseSettings> &noise = std::nullopt);

/// W(x, p) = (1/4pi) int dy e^(-i p y/2) psi(x + y/2) psi*(x - y/2) (the
/// hbar = 2 convention, so the vacuum has unit covariance) on a
/// window given relative to `origin` (use the centroid for a centroid-frame
/// grid and {0, 0} for the lab frame). Off-grid x use an exact Fourier
/// shift of psi; the momentum axis is evaluated by a chirp-z transform.
WignerGrid wigner_transform(const WaveFunction &wf, const GridWindow &window, PhasePoint origin, FrameTag frame);

struct EnsembleConfig {
    const PotentialModel *model = nullptr;
    FreqRatio ratio = FreqRatio::from_trap_over_potential(1);
    SpatialGrid grid;
    PhasePoint start;
    /// Thermal occupation; sampled as Gaussian displacements of variance
    /// 2 n_bar per quadrature.
    double n_bar = 0;
    EvolveOptions evolve;
    DecoherenceParams noise;
    size_t n_traj = 1;
    uint64_t seed = 0;
    /// 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct EnsembleResult {
    size_t n_traj = 0;
    std::vector<double> moment_times;
    std::vector<GaussianMoments> mean_moments;
    /// Jackknife standard errors of each entry of mean_moments.
    std::vector<GaussianMoments> stderr_moments;
    std::vector<double> state_times;
    /// Trajectory-averaged |psi|^2 at each state time.
    std::vector<std::vector<double>> mean_density;
};

/// Trajectory i uses the stream seeded by splitmix64(seed + i); results are
/// reduced in trajectory order, so they do not depend on the thread count.
EnsembleResult ensemble_average(const EnsembleConfig &config);

uint64_t trajectory_seed(uint64_t master, uint64_t index);

}  // namespace wigdyn

#endif
