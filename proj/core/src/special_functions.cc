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

#include "wigdyn/special_functions.h"

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <numbers>

#include "wigdyn/errors.h"

namespace wigdyn {

namespace {

using quad = __float128;

// Ai(0) and -Ai'(0) as double-double sums (about 32 digits).
const quad kAi0 = (quad)0.3550280538878172 + (quad)2.05233632436212e-17;
const quad kMinusAip0 = (quad)0.2588194037928068 + (quad)-2.522243111610832e-17;

struct QComplex {
    quad re = 0;
    quad im = 0;
    QComplex operator+(const QComplex &o) const {
        return {re + o.re, im + o.im};
    }
    QComplex operator-(const QComplex &o) const {
        return {re - o.re, im - o.im};
    }
    QComplex operator*(const QComplex &o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    QComplex operator*(quad s) const {
        return {re * s, im * s};
    }
    double magnitude_estimate() const {
        return std::abs((double)re) + std::abs((double)im);
    }
};

std::complex<double> airy_series(std::complex<double> z) {
    QComplex zq{z.real(), z.imag()};
    QComplex z3 = zq * zq * zq;
    QComplex f{1, 0};
    QComplex g = zq;
    QComplex tf{1, 0};
    QComplex tg = zq;
    for (int k = 1; k < 400; k++) {
        tf = tf * z3 * (1 / (quad)((3 * k - 1) * (3 * k)));
        tg = tg * z3 * (1 / (quad)((3 * k) * (3 * k + 1)));
        f = f + tf;
        g = g + tg;
        double t = tf.magnitude_estimate() + tg.magnitude_estimate();
        if (t < 1e-36 * (f.magnitude_estimate() + g.magnitude_estimate() + 1e-300) && k > 3) {
            break;
        }
    }
    QComplex ai = f * kAi0 - g * kMinusAip0;
    return {(double)ai.re, (double)ai.im};
}

// Coefficients u_k of the Poincare expansions, with the usual recurrence.
constexpr int kMaxAsymptoticTerms = 60;
struct AsymptoticCoefficients {
    double u[kMaxAsymptoticTerms];
    AsymptoticCoefficients() {
        u[0] = 1;
        for (int k = 1; k < kMaxAsymptoticTerms; k++) {
            u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
        }
    }
};
const AsymptoticCoefficients kU;

// sum_k (-1)^k u_k zeta^-k, truncated at the smallest term.
std::complex<double> exponential_sum(std::complex<double> zeta) {
    std::complex<double> inv = 1.0 / zeta;
    std::complex<double> sum = 1, term = 1;
    double last = 1;
    for (int k = 1; k < kMaxAsymptoticTerms; k++) {
        std::complex<double> next = term * (-inv) * (kU.u[k] / kU.u[k - 1]);
        double mag = std::abs(next);
        if (mag > last) {
            break;
        }
        term = next;
        sum += term;
        last = mag;
        if (mag < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

// Even and odd parts for the oscillatory expansion on the negative side.
void oscillatory_sums(std::complex<double> zeta, std::complex<double> &p, std::complex<double> &q) {
    std::complex<double> inv = 1.0 / zeta;
    std::complex<double> pow = 1;
    p = 0;
    q = 0;
    double last = 2;
    for (int k = 0; k < kMaxAsymptoticTerms; k++) {
        std::complex<double> term = pow * kU.u[k];
        double mag = std::abs(term);
        if (k > 1 && mag > last) {
            break;
        }
        // k = 2j contributes (-1)^j to p; k = 2j + 1 contributes (-1)^j to q.
        double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        last = mag;
        if (mag < 1e-18) {
            break;
        }
        pow *= inv;
    }
}

ScaledComplex airy_asymptotic(std::complex<double> z) {
    constexpr double pi = std::numbers::pi;
    double arg = std::arg(z);
    if (std::abs(arg) <= 2 * pi / 3) {
        std::complex<double> zeta = (2.0 / 3.0) * z * std::sqrt(z);
        std::complex<double> pre = 1.0 / (2 * std::sqrt(pi) * std::pow(z, 0.25));
        std::complex<double> phase = std::exp(std::complex<double>(0, -zeta.imag()));
        return {pre * phase * exponential_sum(zeta), -zeta.real()};
    }
    std::complex<double> w = -z;
    std::complex<double> zeta = (2.0 / 3.0) * w * std::sqrt(w);
    std::complex<double> a = zeta - pi / 4;
    double m = std::abs(a.imag());
    std::complex<double> i(0, 1);
    // cos(a) e^-m and sin(a) e^-m without overflow.
    std::complex<double> ep = std::exp(i * a - m);
    std::complex<double> em = std::exp(-i * a - m);
    std::complex<double> cosa = 0.5 * (ep + em);
    std::complex<double> sina = (ep - em) / (2.0 * i);
    std::complex<double> p, q;
    oscillatory_sums(zeta, p, q);
    std::complex<double> pre = 1.0 / (std::sqrt(pi) * std::pow(w, 0.25));
    return {pre * (cosa * p + sina * q), m};
}

}  // namespace

ScaledComplex airy_ai_scaled(std::complex<double> z) {
    if (std::abs(z) < kAirySeriesRadius) {
        return {airy_series(z), 0.0};
    }
    return airy_asymptotic(z);
}

std::complex<double> airy_ai(std::complex<double> z) {
    return airy_ai_scaled(z).value();
}

ScaledReal airy_ai_scaled(double x) {
    if (std::abs(x) < kAirySeriesRadius) {
        return {boost::math::airy_ai(x), 0.0};
    }
    ScaledComplex c = airy_asymptotic({x, 0.0});
    return {c.mantissa.real(), c.log_scale};
}

double airy_ai(double x) {
    return airy_ai_scaled(x).value();
}

namespace {

// [1 + 3s/2 - (1+s)^(3/2)] / s^2, accurate near s = 0.
double cubic_exponent_ratio(double s) {
    if (std::abs(s) <= 0.5) {
        double sum = 0, binom = 0.375, pw = 1;  // binom(3/2, 2)
        for (int n = 2; n < 80; n++) {
            sum -= binom * pw;
            binom *= (1.5 - n) / (n + 1);
            pw *= s;
            if (std::abs(binom * pw) < 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    return (1 + 1.5 * s - std::pow(1 + s, 1.5)) / (s * s);
}

}  // namespace

double gauss_airy_integral(double c3, double c2, double c1) {
    constexpr double pi = std::numbers::pi;
    if (!(c2 >= 0)) {
        throw Error(ErrorKind::DomainError, "gauss_airy_integral requires c2 >= 0");
    }
    if (std::abs(c3) < 1e-30) {
        if (c2 == 0) {
            throw Error(ErrorKind::DomainError, "gauss_airy_integral is a delta function at c3 = c2 = 0");
        }
        return std::exp(-c1 * c1 / (2 * c2)) / std::sqrt(2 * pi * c2);
    }
    double a = c2, b = c3, c = c1;
    double cb = std::cbrt(std::abs(b));
    double arg = (a * a + 4 * b * c) / (4 * std::abs(b) * cb);
    if (arg >= kAirySeriesRadius) {
        // Asymptotic region: the mantissa is Ai(arg) e^zeta, and the total
        // exponent E - zeta is formed without cancellation.
        ScaledReal ai = airy_ai_scaled(arg);
        double expo;
        if (a == 0) {
            expo = ai.log_scale;
        } else {
            double s = 4 * b * c / (a * a);
            if (std::abs(s) <= 1) {
                expo = (4 * c * c / (3 * a)) * cubic_exponent_ratio(s);
            } else {
                expo = (a * a * a + 6 * a * b * c - std::pow(a * a + 4 * b * c, 1.5)) / (12 * b * b);
            }
        }
        return ai.mantissa * std::exp(expo) / cb;
    }
    double e = a * (a * a + 6 * b * c) / (12 * b * b);
    ScaledReal ai = airy_ai_scaled(arg);
    return ai.mantissa * std::exp(e + ai.log_scale) / cb;
}

AiryIdentitySides airy_product_identity_check(std::complex<double> y0, std::complex<double> k) {
    constexpr double pi = std::numbers::pi;
    const double c = std::pow(2.0, -2.0 / 3.0);
    AiryIdentitySides out;
    out.rhs = std::pow(2.0, 2.0 / 3.0) * pi * airy_ai(c * (y0 + k)) * airy_ai(c * (y0 - k));

    auto integrand = [&](double y) {
        return airy_ai(y * y + y0) * std::exp(std::complex<double>(0, 1) * k * y);
    };
    // Truncate where the integrand is negligible on both ends.
    double peak = 0;
    for (double y = -4; y <= 4; y += 0.25) {
        peak = std::max(peak, std::abs(integrand(y)));
    }
    double half_width = 2;
    while (std::abs(integrand(half_width)) + std::abs(integrand(-half_width)) > 1e-18 * std::max(peak, 1e-300)) {
        half_width += 0.5;
        if (half_width > 60) {
            throw Error(ErrorKind::NotConvergent, "Airy product integrand does not decay");
        }
    }
    auto trapezoid = [&](int n) {
        double h = 2 * half_width / n;
        std::complex<double> acc = 0.5 * (integrand(-half_width) + integrand(half_width));
        for (int j = 1; j < n; j++) {
            acc += integrand(-half_width + j * h);
        }
        return acc * h;
    };
    int n = 256;
    std::complex<double> prev = trapezoid(n);
    for (int level = 0; level < 8; level++) {
        n *= 2;
        std::complex<double> cur = trapezoid(n);
        if (std::abs(cur - prev) <= 1e-12 * std::max(std::abs(cur), peak * 1e-6)) {
            out.lhs = cur;
            return out;
        }
        prev = cur;
    }
    throw Error(ErrorKind::NotConvergent, "Airy product quadrature did not converge");
}

JacobiElliptic jacobi_elliptic(double u, double m) {
    if (!(m >= 0 && m < 1)) {
        throw Error(ErrorKind::DomainError, "jacobi_elliptic requires 0 <= m < 1");
    }
    JacobiElliptic out;
    out.sn = boost::math::jacobi_elliptic(std::sqrt(m), u, &out.cn, &out.dn);
    // Boost's dn is off by about 1e-3 at the quarter period; this identity
    // is well conditioned everywhere.
    out.dn = std::sqrt((1 - m) + m * out.cn * out.cn);
    return out;
}

double elliptic_k(double m) {
    if (!(m >= 0 && m < 1)) {
        throw Error(ErrorKind::DomainError, "elliptic_k requires 0 <= m < 1");
    }
    return boost::math::ellint_1(std::sqrt(m));
}

double double_factorial(int n) {
    if (n <= 0) {
        return 1;
    }
    return boost::math::double_factorial<double>((unsigned)n);
}

double gaussian_raw_moment(int n, double variance) {
    if (n < 0) {
        throw Error(ErrorKind::DomainError, "negative moment order");
    }
    if (n % 2) {
        return 0;
    }
    return double_factorial(n - 1) * std::pow(variance, n / 2);
}

}  // namespace wigdyn
