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

#ifndef WIGDYN_MOMENT_ENGINE_H
#define WIGDYN_MOMENT_ENGINE_H

#include <map>
#include <vector>

#include "wigdyn/phase_space.h"

namespace wigdyn {

/// Dense bivariate polynomial sum c[i][j] x^i p^j.
class Poly2 {
   public:
    Poly2() = default;
    static Poly2 constant(double c);
    static Poly2 monomial(int i, int j, double c = 1);

    int degree_x() const {
        return (int)c_.size() - 1;
    }
    int degree_p() const;
    bool is_zero() const;
    double coeff(int i, int j) const;
    void add_term(int i, int j, double c);

    Poly2 operator+(const Poly2 &o) const;
    Poly2 operator-(const Poly2 &o) const;
    Poly2 operator*(const Poly2 &o) const;
    Poly2 operator*(double s) const;

    /// d^k/dp^k.
    Poly2 dp(int k) const;
    /// Multiplies by x^k.
    Poly2 times_x(int k) const;
    /// g(r) = f(m r).
    Poly2 linear_substitute(const Mat2 &m) const;
    /// g(r) = f(r + shift).
    Poly2 shift(PhasePoint shift) const;
    /// g(x, p) = f(x, p - k(x)) with k(x) = sum k[a] x^a.
    Poly2 shear_p(const std::vector<double> &k) const;
    double eval(PhasePoint r) const;
    /// E[f(z)] for z ~ N(0, cov).
    double gaussian_expectation(const Mat2 &cov) const;

   private:
    void trim();
    std::vector<std::vector<double>> c_;  // c_[i][j]
};

/// E[x^a p^b] for a centered Gaussian.
double gaussian_moment(int a, int b, const Mat2 &cov);

/// One constant-angle segment acting in the Gaussian frame.
///
/// In rotated coordinates r_phi = R(phi_bar) r_g the Wigner function is
/// mapped by exp(Lambda) followed by a p-diffusion of variance sigma_sq,
/// where in the Fourier variable conjugate to p
///   exp(Lambda) = exp(i sum_n kappa_n [(x + k)^n - (x - k)^n] / (2n)).
/// The n = 3, 4 terms are a shear p -> p + kappa_3 x^2 + kappa_4 x^3 and
/// a cubic (kappa_3 + 3 kappa_4 x) k^3 / 3.
struct SegmentMap {
    double phi_bar = 0;
    std::map<int, double> kappa;
    double sigma_sq = 0;
    /// Drop the odd p-derivatives beyond the first.
    bool classical = false;
};

/// Heisenberg pullback of an observable through one segment map.
Poly2 pull_back(const Poly2 &f, const SegmentMap &segment);

/// First and second moments in the Gaussian frame after applying the
/// segments in order to the initial Gaussian-frame state.
GaussianMoments gaussian_frame_moments(const std::vector<SegmentMap> &segments, const GaussianMoments &initial);

}  // namespace wigdyn

#endif
