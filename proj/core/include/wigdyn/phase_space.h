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

#ifndef WIGDYN_PHASE_SPACE_H
#define WIGDYN_PHASE_SPACE_H

#include <cmath>

namespace wigdyn {

/// Point in dimensionless phase space. Positions are in units of the
/// zero-point length and momenta in units of the zero-point momentum, so
/// [x, p] = 2i and the vacuum covariance is the identity.
struct PhasePoint {
    double x = 0;
    double p = 0;

    PhasePoint operator+(const PhasePoint &o) const {
        return {x + o.x, p + o.p};
    }
    PhasePoint operator-(const PhasePoint &o) const {
        return {x - o.x, p - o.p};
    }
    PhasePoint operator*(double s) const {
        return {x * s, p * s};
    }
    double norm() const {
        return std::hypot(x, p);
    }
    bool operator==(const PhasePoint &o) const = default;
};

/// Row-major 2x2 real matrix acting on (x, p) column vectors.
struct Mat2 {
    double xx = 1, xp = 0;
    double px = 0, pp = 1;

    static Mat2 identity() {
        return {};
    }
    static Mat2 zero() {
        return {0, 0, 0, 0};
    }
    static Mat2 diag(double a, double b) {
        return {a, 0, 0, b};
    }
    /// Rotation taking lab coordinates to coordinates at angle phi:
    /// x_phi = cos(phi) x + sin(phi) p.
    static Mat2 rotation(double phi) {
        double c = std::cos(phi), s = std::sin(phi);
        return {c, s, -s, c};
    }

    double det() const {
        return xx * pp - xp * px;
    }
    double trace() const {
        return xx + pp;
    }
    Mat2 transpose() const {
        return {xx, px, xp, pp};
    }
    /// Inverse assuming unit determinant.
    Mat2 symplectic_inverse() const {
        return {pp, -xp, -px, xx};
    }
    Mat2 inverse() const {
        double d = det();
        return {pp / d, -xp / d, -px / d, xx / d};
    }
    double hilbert_schmidt() const {
        return std::sqrt(xx * xx + xp * xp + px * px + pp * pp);
    }

    Mat2 operator*(const Mat2 &o) const {
        return {xx * o.xx + xp * o.px, xx * o.xp + xp * o.pp, px * o.xx + pp * o.px, px * o.xp + pp * o.pp};
    }
    PhasePoint operator*(const PhasePoint &v) const {
        return {xx * v.x + xp * v.p, px * v.x + pp * v.p};
    }
    Mat2 operator+(const Mat2 &o) const {
        return {xx + o.xx, xp + o.xp, px + o.px, pp + o.pp};
    }
    Mat2 operator-(const Mat2 &o) const {
        return {xx - o.xx, xp - o.xp, px - o.px, pp - o.pp};
    }
    Mat2 operator*(double s) const {
        return {xx * s, xp * s, px * s, pp * s};
    }
    bool operator==(const Mat2 &o) const = default;
};

/// The Gaussian-frame propagator. Kept as an alias: the symplectic property
/// is a checked invariant, not a type-level guarantee.
using Symplectic2 = Mat2;

/// A x A^T for symmetric sandwiches.
inline Mat2 congruence(const Mat2 &a, const Mat2 &c) {
    return a * c * a.transpose();
}

/// The two frequencies of the problem enter only through their ratio. Both
/// directions are exposed by name because the literature switches between
/// them freely.
class FreqRatio {
   public:
    static FreqRatio from_trap_over_potential(double r) {
        return FreqRatio(r);
    }
    static FreqRatio from_potential_over_trap(double w) {
        return FreqRatio(1.0 / w);
    }
    /// omega_t / omega: multiplies p in dx/dtau.
    double r() const {
        return r_;
    }
    /// omega / omega_t: multiplies U'(x) in dp/dtau.
    double inv() const {
        return 1.0 / r_;
    }

   private:
    explicit FreqRatio(double r) : r_(r) {
    }
    double r_;
};

struct GaussianMoments {
    PhasePoint mean;
    Mat2 cov = Mat2::identity();

    /// Thermal state with occupation n_bar displaced to `mean`.
    static GaussianMoments thermal(double n_bar, PhasePoint mean = {}) {
        double v = 2 * n_bar + 1;
        return {mean, Mat2::diag(v, v)};
    }
};

}  // namespace wigdyn

#endif
