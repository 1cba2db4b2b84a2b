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

#ifndef WIGDYN_DECOHERENCE_H
#define WIGDYN_DECOHERENCE_H

#include <span>
#include <vector>

#include "wigdyn/phase_space.h"
#include "wigdyn/potential.h"

namespace wigdyn {

/// Decoherence inputs.
///
/// Rates are in units of omega_t. The two noise spectral densities carry
/// units of time; they are stored multiplied by omega_t, so
///   gamma_fluc / omega_t = (pi/2) r^-4 (s1 U''(x_c)^2 + s2 U'(x_c)^2)
/// with r = omega_t / omega. s1 belongs to jitter of the potential centre,
/// which couples through U', and s2 to relative fluctuations of the
/// amplitude of U.
struct DecoherenceParams {
    double gamma_loc = 0;
    double s1 = 0;
    double s2 = 0;
    bool any() const {
        return gamma_loc != 0 || s1 != 0 || s2 != 0;
    }
};

/// Coefficients of the dissipator after Taylor-expanding U about 0.
///
/// gamma_nm (units of omega_t) weights the double commutator of x^n and
/// x^m:
///   gamma_nm = (pi/2) r^-4 (s1 u_{n+1} u_{m+1} + s2 u_n u_m) / (n! m!)
///              + [n = m = 1] gamma_loc,
/// where u_n = U^(n)(0). With these,
///   sum_{n,m} n m gamma_nm x^(n+m-2) = gamma_fluc(x) + gamma_loc.
///
/// c(n, m, k) multiplies x^(n+m-k) d^k/dp^k W per unit tau:
///   c = i^k (1 + (-1)^k) (gamma_nm r / 2)
///       [sum_q (-1)^q C(n,q) C(m,k-q) - C(n+m,k)].
/// Odd k vanish and the even ones are real.
struct DecoherenceSpec {
    DecoherenceParams params;
    int order = 4;
    FreqRatio ratio = FreqRatio::from_trap_over_potential(1);
    /// (order+1) x (order+1), index 0 unused.
    std::vector<std::vector<double>> gamma_nm;
    /// Flattened [n][m][k] with n, m in 1..order and k in 0..2*order.
    std::vector<double> c_nmk;

    double gamma(int n, int m) const {
        return gamma_nm[n][m];
    }
    double c(int n, int m, int k) const;
};

/// Requires U derivatives up to order+1 at the origin.
DecoherenceSpec build_coefficients(
    const PotentialModel &model, const DecoherenceParams &params, FreqRatio ratio, int order);

/// gamma_fluc(tau) / omega_t along the centroid. With s1 = 0 only the
/// force-noise term is kept.
std::vector<double> gamma_fluc(
    const PotentialModel &model, std::span<const PhasePoint> centroid, FreqRatio ratio, double s1, double s2);

/// Time-independent bound for the quartic double well while
/// |x_c| <= sqrt(2) d, where |U''| <= 5 and U'^2 <= 2 d^2:
///   (pi/2) r^-4 (25 s1 + 2 s2 d^2).
double gamma_fluc_upper_double_well(double d, FreqRatio ratio, double s1, double s2);

/// sigma_b^2(tau) = 4 int (gamma_eff / omega) eta^2 dtau from the first sample.
/// gamma_eff is in units of omega_t, so gamma/omega = r gamma_eff.
std::vector<double> blurring(
    std::span<const double> eta, std::span<const double> gamma_eff, std::span<const double> tau, FreqRatio ratio);

/// Sigma_b = sigma_b^2 (S R^T e2)(S R^T e2)^T with R = R(phi_bar).
std::vector<Mat2> blurring_matrix(
    std::span<const double> sigma_b_sq, std::span<const Symplectic2> S, double phi_bar);

/// Direction S R(phi_bar)^T e2 along which blurring acts in the centroid frame.
PhasePoint blurring_direction(const Symplectic2 &S, double phi_bar);

}  // namespace wigdyn

#endif
