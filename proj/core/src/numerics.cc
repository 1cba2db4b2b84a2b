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

#include "wigdyn/numerics.h"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "wigdyn/errors.h"

namespace wigdyn {

std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> t) {
    assert(f.size() == t.size());
    std::vector<double> out(f.size(), 0.0);
    for (size_t i = 1; i < f.size(); i++) {
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    }
    return out;
}

namespace {

// Integral over [x0, x1] of the parabola through (a, fa), (b, fb), (c, fc).
double parabola_integral(double a, double fa, double b, double fb, double c, double fc, double x0, double x1) {
    // Newton form: fa + d1 (x - a) + d2 (x - a)(x - b).
    double d1 = (fb - fa) / (b - a);
    double d2 = ((fc - fb) / (c - b) - d1) / (c - a);
    auto prim = [&](double x) {
        double u = x - a;
        // int (x - a)(x - b) dx = u^3/3 + (a - b) u^2 / 2
        return fa * u + d1 * u * u / 2 + d2 * (u * u * u / 3 + (a - b) * u * u / 2);
    };
    return prim(x1) - prim(x0);
}

}  // namespace

std::vector<double> cumulative_simpson(std::span<const double> f, std::span<const double> t) {
    assert(f.size() == t.size());
    size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 3) {
        return cumulative_trapezoid(f, t);
    }
    for (size_t i = 0; i + 1 < n; i++) {
        // Average the two parabolas that contain the interval where both
        // exist; this cancels their leading error terms on smooth data.
        double acc = 0;
        int count = 0;
        if (i >= 1) {
            acc += parabola_integral(t[i - 1], f[i - 1], t[i], f[i], t[i + 1], f[i + 1], t[i], t[i + 1]);
            count++;
        }
        if (i + 2 < n) {
            acc += parabola_integral(t[i], f[i], t[i + 1], f[i + 1], t[i + 2], f[i + 2], t[i], t[i + 1]);
            count++;
        }
        out[i + 1] = out[i] + acc / count;
    }
    return out;
}

std::vector<double> central_derivative(std::span<const double> f, std::span<const double> t) {
    size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) {
        return out;
    }
    if (n == 2) {
        out[0] = out[1] = (f[1] - f[0]) / (t[1] - t[0]);
        return out;
    }
    for (size_t i = 1; i + 1 < n; i++) {
        double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        out[i] = (-h1 / (h0 * (h0 + h1))) * f[i - 1] + ((h1 - h0) / (h0 * h1)) * f[i] + (h0 / (h1 * (h0 + h1))) * f[i + 1];
    }
    out[0] = (f[1] - f[0]) / (t[1] - t[0]);
    out[n - 1] = (f[n - 1] - f[n - 2]) / (t[n - 1] - t[n - 2]);
    return out;
}

double interp_linear(std::span<const double> t, std::span<const double> f, double t0) {
    if (t.empty()) {
        throw Error(ErrorKind::DomainError, "interpolation on an empty grid");
    }
    if (t0 <= t.front()) {
        return f.front();
    }
    if (t0 >= t.back()) {
        return f.back();
    }
    size_t k = std::upper_bound(t.begin(), t.end(), t0) - t.begin();
    double w = (t0 - t[k - 1]) / (t[k] - t[k - 1]);
    return f[k - 1] * (1 - w) + f[k] * w;
}

double hermite_eval(double t0, double f0, double df0, double t1, double f1, double df1, double t) {
    double h = t1 - t0;
    double s = (t - t0) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * f0 + h10 * h * df0 + h01 * f1 + h11 * h * df1;
}

double hermite_root(double t0, double f0, double df0, double t1, double f1, double df1, double tol) {
    if (f0 == 0) {
        return t0;
    }
    if (f1 == 0) {
        return t1;
    }
    double lo = t0, hi = t1;
    double flo = f0;
    for (int it = 0; it < 200 && hi - lo > tol; it++) {
        double mid = 0.5 * (lo + hi);
        double fm = hermite_eval(t0, f0, df0, t1, f1, df1, mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double max_relative_gap(std::span<const double> a, std::span<const double> b) {
    double scale = 0, gap = 0;
    for (size_t i = 0; i < a.size() && i < b.size(); i++) {
        scale = std::max(scale, std::abs(b[i]));
        gap = std::max(gap, std::abs(a[i] - b[i]));
    }
    return scale > 0 ? gap / scale : gap;
}

std::vector<double> linspace(double lo, double hi, size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (size_t i = 0; i < n; i++) {
        out[i] = lo + (hi - lo) * (double)i / (double)(n - 1);
    }
    return out;
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

}  // namespace wigdyn
