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

#ifndef WIGDYN_ANALYTIC_WIGNER_H
#define WIGDYN_ANALYTIC_WIGNER_H

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "wigdyn/gaussian_frame.h"
#include "wigdyn/moment_engine.h"
#include "wigdyn/phase_space.h"
#include "wigdyn/wigner_grid.h"

namespace wigdyn {

// ---------------------------------------------------------------------------
// Angle selection.

struct AngleChoice {
    double phi_bar = 0;
    /// Time of largest expansion (or the fallback time).
    double tau_star = 0;
    /// Set when eta has no interior maximum in the segment.
    bool fallback = false;
};

/// phi at argmax eta over [tau_begin, tau_end]. Without an interior maximum
/// the angle is taken where eta peaks on the boundary, or at the midpoint
/// when eta is flat, and the result is flagged.
AngleChoice choose_angle(const FrameRecord &frames, double tau_begin, double tau_end);

struct AngleSegment {
    double tau_start = 0;
    double tau_end = 0;
    double phi_bar = 0;
};

struct AngleSchedule {
    std::vector<AngleSegment> segments;
    /// Offset of the second segment from phi_bar_1 + pi.
    double delta = 0;

    /// Throws DomainError unless the segments are contiguous from 0 to
    /// tau_end and |delta| < 0.1.
    void validate(double tau_end) const;
    size_t segment_index(double tau) const;
    double phi_bar_at(double tau) const;
};

/// One segment up to the first turning point inside [0, tau_end], then a
/// second one at phi_bar_1 + pi + delta. A single segment when the centroid
/// does not turn.
AngleSchedule auto_schedule(const FrameRecord &frames, double tau_end, double delta, AngleChoice *first = nullptr);

// ---------------------------------------------------------------------------
// Moments.

/// Gaussian-frame segment maps in effect at tau. sigma_sq_cumulative is the
/// blurring variance accumulated from tau = 0 on the frame grid; pass an
/// empty span for coherent evolution.
std::vector<SegmentMap> segment_maps_at(
    const FrameRecord &frames,
    const AngleSchedule &schedule,
    std::span<const double> sigma_sq_cumulative,
    double tau,
    bool classical = false);

/// Approximate lab-frame moments at each requested time for an arbitrary
/// schedule. `initial` is the lab-frame initial state.
std::vector<GaussianMoments> schedule_moments(
    const FrameRecord &frames,
    const AngleSchedule &schedule,
    std::span<const double> sigma_sq_cumulative,
    const GaussianMoments &initial,
    std::span<const double> taus);

/// Single-segment closed forms. `initial_g` is the centred Gaussian-frame
/// initial state; kappa maps n to kappa_n at the current time.
PhasePoint approx_first_moment(
    const Symplectic2 &S,
    PhasePoint r_cl,
    const std::map<int, double> &kappa,
    double phi_bar,
    const GaussianMoments &initial_g);

/// Sigma_b is added as given (lab frame). `psd` reports whether the result
/// is positive semidefinite; a failure is not fatal.
Mat2 approx_covariance(
    const Symplectic2 &S,
    const std::map<int, double> &kappa,
    double phi_bar,
    const Mat2 &sigma_b,
    const GaussianMoments &initial_g,
    bool *psd = nullptr);

// ---------------------------------------------------------------------------
// Wigner functions.

/// Parameters of the first-segment state in rotated Gaussian-frame
/// coordinates.
struct CubicPhaseParams {
    double kappa3 = 0;
    double kappa4 = 0;
    double sigma_sq = 0;
    double n_bar = 0;
};

/// W(x, p) = exp(-x^2 / 2v) / sqrt(2 pi v)
///           * GA(kappa3 + 3 kappa4 x, v + sigma_sq, p + kappa3 x^2 + kappa4 x^3)
/// with v = 2 n_bar + 1 and GA the Gauss-Airy integral.
double segment1_wigner(double x_phi, double p_phi, const CubicPhaseParams &params);

/// Samples segment1_wigner on a window of rotated coordinates.
WignerGrid analytic_wigner_segment1(const GridWindow &window, const CubicPhaseParams &params);

/// A Wigner function in unrotated Gaussian-frame coordinates.
class GaussianFrameState {
   public:
    virtual ~GaussianFrameState() = default;
    virtual double operator()(PhasePoint r_g) const = 0;
};

class SegmentOneState final : public GaussianFrameState {
   public:
    SegmentOneState(double phi_bar, CubicPhaseParams params) : phi_bar_(phi_bar), params_(params) {
    }
    double operator()(PhasePoint r_g) const override;
    double phi_bar() const {
        return phi_bar_;
    }
    const CubicPhaseParams &params() const {
        return params_;
    }

   private:
    double phi_bar_;
    CubicPhaseParams params_;
};

/// Second-segment generator at the current time, relative to the segment
/// start.
struct SegmentTwoParams {
    double phi_bar = 0;
    std::map<int, double> kappa;
    double sigma_sq = 0;
    /// Keep only the exact shear.
    bool classical = false;
};

struct ComposeOptions {
    /// Rows along x in the second-segment frame.
    size_t nx = 256;
    size_t np = 512;
    /// Window in (x2, p2); zero extents mean automatic sizing from the
    /// approximate moments.
    GridWindow window{0, 0, 0, 0, 0, 0};
    /// Tail cut for the row support, in e-folds.
    double tail_efolds = 35;
    /// Largest FFT length per row.
    size_t max_row_length = size_t(1) << 22;
    /// Allowed deviation of the composed grid's mass from 1 before
    /// NotConvergent is thrown.
    double mass_tolerance = 1e-2;
};

/// Result of pushing the first-segment state through a second segment.
/// Rows of constant x2 are computed exactly by a row FFT: the first-segment
/// state is sampled along the row, the cubic and higher odd-derivative terms
/// and the blurring act as a Fourier multiplier, and the classical shear is
/// applied by evaluating at p2 + sum kappa'_n x2^(n-1). Off the grid nodes
/// the state is interpolated with cubic Lagrange stencils.
class ComposedState final : public GaussianFrameState {
   public:
    ComposedState(double phi_bar2, WignerGrid grid) : phi_bar2_(phi_bar2), grid_(std::move(grid)) {
    }
    double operator()(PhasePoint r_g) const override;
    /// Samples on the (x2, p2) window, frame tag Gaussian.
    const WignerGrid &rotated_grid() const {
        return grid_;
    }
    double phi_bar2() const {
        return phi_bar2_;
    }

   private:
    double phi_bar2_;
    WignerGrid grid_;
};

ComposedState compose_segments(
    const SegmentOneState &first, const SegmentTwoParams &second, const ComposeOptions &options = {});

/// Evaluates a Gaussian-frame state on a lab (absolute) or centroid
/// (relative to r_cl) window: W(r) = W_g(S^-1 (r - r_cl)).
WignerGrid to_lab_frame(
    const GaussianFrameState &state,
    const Symplectic2 &S,
    PhasePoint r_cl,
    const GridWindow &window,
    FrameTag frame,
    double tau);

/// Centroid-frame window of +-max(10 eta, 50) in x around the approximate
/// mean offset and +-10 sqrt(C_pp) in p.
GridWindow auto_window(double eta, PhasePoint mean_offset, const Mat2 &cov, size_t nx, size_t np);

// ---------------------------------------------------------------------------
// Marginals and fringes.

/// Position density of the pure first-segment state (kappa4 = 0, n_bar = 0)
/// at lab positions x, normalised on x by the trapezoid rule. With
/// A = S R(phi_bar)^T = [[a, b], [c, d]], the state is the image of
/// psi(y) ~ exp(-y^2/4 - i kappa3 y^3 / 6) under the metaplectic operator of
/// A, so P(x) ~ |int dy exp(i(a y^2 - 2 (x - x_c) y) / 4b) psi(y)|^2, an
/// Airy function of complex argument.
std::vector<double> position_marginal_coherent(
    std::span<const double> x, const Symplectic2 &S, double phi_bar, double kappa3, PhasePoint r_cl);

/// Gaussian convolution of variance c_b_xx. Each source sample spreads its
/// mass with a kernel normalised on the grid, so the trapezoid mass is kept.
std::vector<double> position_marginal_decohered(
    std::span<const double> x, std::span<const double> density, double c_b_xx);

/// Lab position density of a composed state: for each x the interpolated
/// state is integrated along lab p by the trapezoid rule, in steps of half a
/// rotated-grid cell.
std::vector<double> position_marginal_composed(
    const ComposedState &state, const Symplectic2 &S, PhasePoint r_cl, std::span<const double> x);

struct FringeTable {
    /// Local maxima by decreasing height.
    std::vector<double> peak_x;
    std::vector<double> peak_height;
    /// The global maximum and the taller of its neighbouring maxima.
    double main_x = 0;
    double second_x = 0;
    double delta_x_f = 0;
    /// (P_second - P_min) / (P_second + P_min) with P_min between the two.
    double visibility = 0;
    bool has_second = false;
};

/// Peaks refined by parabolic interpolation. Maxima below rel_floor of the
/// global maximum are ignored.
FringeTable analyze_fringes(std::span<const double> x, std::span<const double> density, double rel_floor = 1e-6);

// ---------------------------------------------------------------------------
// Validity metrics.

/// chi(tau) = sum_n int |beta_n| |phi - phi_bar|, cumulative trapezoid.
std::vector<double> chi_metric(
    const OrderSeries &beta, std::span<const double> phi, double phi_bar, std::span<const double> tau);
std::vector<double> chi_metric(
    const OrderSeries &beta, std::span<const double> phi, const AngleSchedule &schedule, std::span<const double> tau);

struct EpsilonSeries {
    std::vector<double> eps1;
    std::vector<double> eps2;
};

/// eps1 = 2 |mu - mu_a| / (|mu| + |mu_a|), eps2 the same with the
/// Hilbert-Schmidt norm of the covariances.
EpsilonSeries epsilon_metrics(std::span<const GaussianMoments> exact, std::span<const GaussianMoments> approx);

// ---------------------------------------------------------------------------
// Second-segment offset.

struct DeltaScan {
    double best = 0;
    std::vector<double> deltas;
    std::vector<double> l1;
};

/// Picks the candidate whose analytic position density is closest in L1 to
/// the reference on the shared axis x.
DeltaScan calibrate_delta(
    std::span<const double> x,
    std::span<const double> reference_density,
    std::span<const double> candidates,
    const std::function<std::vector<double>(double)> &analytic_density);

/// int |a - b| dx / int |b| dx on a uniform axis, both renormalised.
double density_l1(std::span<const double> x, std::span<const double> a, std::span<const double> b);

}  // namespace wigdyn

#endif
