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

#ifndef WIGDYN_CLASSICAL_DYNAMICS_H
#define WIGDYN_CLASSICAL_DYNAMICS_H

#include <optional>
#include <span>
#include <vector>

#include "wigdyn/phase_space.h"
#include "wigdyn/potential.h"

namespace wigdyn {

/// Centroid equations of motion in dimensionless time tau = omega t:
///   dx/dtau = r p,   dp/dtau = -U'(x) / r,   r = omega_t / omega.
/// The conserved energy is E = r p^2 / 2 + U(x) / r.
double classical_energy(const PotentialModel &model, FreqRatio ratio, PhasePoint point);

/// One sample of the joint flow of the centroid and its tangent map.
struct FlowSample {
    double tau = 0;
    PhasePoint point;
    Symplectic2 S;
};

struct FlowOptions {
    /// Upper bound on the step.
    double max_step = 1e-4;
    /// When positive, the step is also capped so that the Gaussian-frame
    /// angle advances by at most this many radians per step. The angle
    /// rate is r / eta^2, which becomes large while the state recompresses.
    double max_angle_step = 0;
    bool track_tangent = false;
    /// Times the adaptive stepper must land on exactly (sorted).
    std::vector<double> checkpoints;
};

/// Fourth-order symplectic (Yoshida) drift-kick integration of the centroid.
/// When requested, the tangent map S is carried by the same linearised
/// shears, which keeps det S = 1 to rounding.
std::vector<FlowSample> integrate_flow(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, const FlowOptions &options);

struct ClassicalTrajectory {
    std::vector<double> tau;
    std::vector<PhasePoint> points;
    double energy = 0;
    /// All sign changes of p, refined by Hermite interpolation.
    std::vector<double> turning_points;
    /// First turning point.
    std::optional<double> tau_max;
    /// First zero of the spring constant U''(x_c).
    std::optional<double> tau_three;
    /// Largest relative energy deviation seen along the stored samples.
    double energy_drift = 0;
};

/// Samples of p and x with derivatives, used for event detection.
ClassicalTrajectory trajectory_from_samples(
    const PotentialModel &model, FreqRatio ratio, std::span<const FlowSample> samples);

/// Fixed-step integration. Throws IntegrationAccuracy when the relative
/// energy drift exceeds 1e-6.
ClassicalTrajectory integrate_classical(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, double dtau);

struct DoubleWellTimescales {
    double tau_max = 0;
    double x_turn = 0;
};

/// Leading-order closed forms for a start at rest at x_s:
///   tau_max = ln(4 sqrt(2) d / x_s),   x_turn = sqrt(2 d^2 - x_s^2).
/// The first drops corrections of order (x_s/d)^2.
DoubleWellTimescales double_well_timescales(double d, double x_s);

/// Exact turning time for the quartic well, K(m) sqrt(2) d / x_hi.
double double_well_exact_tau_max(double d, double x_s);

/// Closed-form double-well trajectory from rest at x_s through Jacobi
/// elliptic functions. With a = |x_s| and b = sqrt(2 d^2 - x_s^2), the
/// motion oscillates between them as x = max(a,b) dn(lambda tau + u0, m),
/// m = 1 - min(a,b)^2/max(a,b)^2, lambda = max(a,b)/(sqrt(2) d), where
/// u0 = K(m) when starting from the inner turning point.
/// Throws NotApplicable outside that setting.
std::vector<PhasePoint> elliptic_cross_check(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, std::span<const double> tau);

}  // namespace wigdyn

#endif
