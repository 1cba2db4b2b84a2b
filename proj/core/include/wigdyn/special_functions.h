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

#ifndef WIGDYN_SPECIAL_FUNCTIONS_H
#define WIGDYN_SPECIAL_FUNCTIONS_H

#include <cmath>
#include <complex>

namespace wigdyn {

/// Airy function of the first kind. Inside |z| < kAirySeriesRadius a
/// Maclaurin series summed in quad precision is used (the series cancels
/// badly in double precision once |z| exceeds about 4). Outside, the
/// Poincare expansions are used: the exponential one for |arg z| <= 2pi/3
/// and the oscillatory one with w = -z elsewhere. At the crossover both
/// representations agree to better than 1e-13.
constexpr double kAirySeriesRadius = 9.0;

std::complex<double> airy_ai(std::complex<double> z);

/// Real axis. Inside the series radius this defers to Boost.Math, which is
/// much faster than the quad-precision series and equally accurate there.
double airy_ai(double x);

/// Ai(z) = mantissa * exp(log_scale). The exponential growth/decay is
/// carried by log_scale so that callers multiplying by large exponential
/// prefactors can cancel exponents before exponentiating.
struct ScaledComplex {
    std::complex<double> mantissa;
    double log_scale = 0;
    std::complex<double> value() const {
        return mantissa * std::exp(log_scale);
    }
};
struct ScaledReal {
    double mantissa = 0;
    double log_scale = 0;
    double value() const {
        return mantissa * std::exp(log_scale);
    }
};

ScaledComplex airy_ai_scaled(std::complex<double> z);
ScaledReal airy_ai_scaled(double x);

/// (1/2pi) int dk exp(i c3 k^3 / 3 - c2 k^2 / 2 + i c1 k), evaluated in
/// closed form as
///   |c3|^(-1/3) exp((c2^3 + 6 c3 c2 c1)/(12 c3^2))
///     * Ai((c2^2 + 4 c3 c1)/(4 |c3|^(4/3))).
/// The exponent and the Airy decay cancel to leading order; that
/// difference is formed analytically so small |c3| does not lose digits.
/// Requires c2 >= 0. For |c3| < 1e-30 the Gaussian limit is returned.
double gauss_airy_integral(double c3, double c2, double c1);

/// Both sides of
///   int dy Ai(y^2 + y0) e^{i k y} = 2^(2/3) pi Ai(2^(-2/3)(y0 + k)) Ai(2^(-2/3)(y0 - k)).
/// The left side is computed by trapezoidal quadrature on the real line.
struct AiryIdentitySides {
    std::complex<double> lhs;
    std::complex<double> rhs;
};
AiryIdentitySides airy_product_identity_check(std::complex<double> y0, std::complex<double> k);

struct JacobiElliptic {
    double sn = 0;
    double cn = 1;
    double dn = 1;
};
/// Jacobi elliptic functions with parameter m = k^2 in [0, 1).
JacobiElliptic jacobi_elliptic(double u, double m);

/// Complete elliptic integral of the first kind, parameter m in [0, 1).
double elliptic_k(double m);

/// n!! with the conventions (-1)!! = 0!! = 1.
double double_factorial(int n);

/// E[x^n] for a centered Gaussian of the given variance.
double gaussian_raw_moment(int n, double variance);

}  // namespace wigdyn

#endif
