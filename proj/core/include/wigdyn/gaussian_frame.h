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

#ifndef WIGDYN_GAUSSIAN_FRAME_H
#define WIGDYN_GAUSSIAN_FRAME_H

#include <map>
#include <span>
#include <vector>

#include "wigdyn/classical_dynamics.h"
#include "wigdyn/phase_space.h"
#include "wigdyn/potential.h"

namespace wigdyn {

using OrderSeries = std::map<int, std::vector<double>>;

/// Everything the analytic solution needs along the centroid trajectory.
///
/// S(tau) is the tangent map of the centroid flow. Its first row defines
///   eta = sqrt(Sxx^2 + Sxp^2),   phi = atan2(Sxp, Sxx)  (unwrapped),
/// and obeys dphi/dtau = r / eta^2. beta_n = U^(n)(x_c) eta^n / (r (n-1)!)
/// and kappa_n is its running integral.
struct FrameRecord {
    FreqRatio ratio = FreqRatio::from_trap_over_potential(1);
    std::vector<double> tau;
    std::vector<PhasePoint> centroid;
    std::vector<double> alpha;
    std::vector<Symplectic2> S;
    std::vector<double> eta;
    std::vector<double> phi;
    OrderSeries beta;
    OrderSeries kappa;
    ClassicalTrajectory trajectory;

    size_t size() const {
        return tau.size();
    }
    /// Index of the sample closest to t.
    size_t index_near(double t) const;
    /// Running integral of beta_n from t0 (the segment start) to each sample.
    std::vector<double> kappa_from(int n, double t0) const;
    /// kappa_n(t1) - kappa_n(t0) interpolated.
    double kappa_between(int n, double t0, double t1) const;
};

struct FrameOptions {
    double max_step = 1e-4;
    /// Angle advance per step near recompression, in radians.
    double max_angle_step = 2e-3;
    int truncation_order = 4;
    std::vector<double> checkpoints;
};

/// Integrates the centroid and S together and fills every derived series.
FrameRecord build_frames(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, const FrameOptions &options);

/// alpha(tau) = U''(x_c(tau)).
/// Centroid and propagator at an arbitrary tau inside the record, integrated
/// from the closest earlier sample so that det S stays exact.
FlowSample frame_sample_at(const PotentialModel &model, const FrameRecord &frames, double tau, double max_step = 1e-4);

std::vector<double> spring_constant(const PotentialModel &model, const ClassicalTrajectory &trajectory);

/// Solves dS/dtau = [[0, r], [-alpha/r, 0]] S, S(0) = 1, from samples of
/// alpha alone. Fourth-order Magnus steps between samples, with alpha at the
/// Gauss nodes from local cubic interpolation. Every step is an exact
/// exponential of a traceless matrix, so det S = 1 to rounding; a deviation
/// above 1e-9 throws IntegrationAccuracy.
std::vector<Symplectic2> propagate_S(std::span<const double> alpha, FreqRatio ratio, std::span<const double> tau);

struct EtaPhi {
    std::vector<double> eta;
    std::vector<double> phi;
};

/// Continuous angle, phi(0) = atan2 at the first sample. Steps of |dphi|
/// >= pi/2 cannot be unwrapped reliably and throw IntegrationAccuracy.
EtaPhi eta_phi(std::span<const Symplectic2> S);

OrderSeries beta_coefficients(
    const PotentialModel &model,
    std::span<const PhasePoint> centroid,
    std::span<const double> eta,
    FreqRatio ratio,
    const std::vector<int> &orders);

/// Running integrals; the trapezoid and a third-order rule must agree to
/// 1e-6 of the largest value or QuadratureAccuracy is thrown. Returns the
/// higher-order result.
OrderSeries kappa_integrals(const OrderSeries &beta, std::span<const double> tau);

/// Mean follows the centroid, covariance is S C(0) S^T.
std::vector<GaussianMoments> thawed_gaussian_state(const GaussianMoments &initial, const FrameRecord &frames);

}  // namespace wigdyn

#endif
