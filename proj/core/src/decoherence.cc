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

#include "wigdyn/decoherence.h"

#include <cmath>
#include <numbers>

#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"

namespace wigdyn {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    double acc = 1;
    for (int j = 1; j <= k; j++) {
        acc = acc * (n - k + j) / j;
    }
    return acc;
}

size_t c_index(int order, int n, int m, int k) {
    return ((size_t)(n - 1) * order + (m - 1)) * (2 * order + 1) + k;
}

}  // namespace

double DecoherenceSpec::c(int n, int m, int k) const {
    if (n < 1 || m < 1 || n > order || m > order || k < 0 || k > 2 * order) {
        return 0;
    }
    return c_nmk[c_index(order, n, m, k)];
}

DecoherenceSpec build_coefficients(
    const PotentialModel &model, const DecoherenceParams &params, FreqRatio ratio, int order) {
    if (order < 1) {
        throw Error(ErrorKind::DomainError, "decoherence tables need order >= 1");
    }
    DecoherenceSpec spec;
    spec.params = params;
    spec.order = order;
    spec.ratio = ratio;

    std::vector<double> u(order + 2), fact(order + 2);
    fact[0] = 1;
    for (int n = 0; n <= order + 1; n++) {
        u[n] = model.taylor_derivative(n);
        if (n > 0) {
            fact[n] = fact[n - 1] * n;
        }
    }
    const double r = ratio.r();
    const double pref = std::numbers::pi / 2 / (r * r * r * r);
    spec.gamma_nm.assign(order + 1, std::vector<double>(order + 1, 0.0));
    for (int n = 1; n <= order; n++) {
        for (int m = 1; m <= order; m++) {
            double g = pref * (params.s1 * u[n + 1] * u[m + 1] + params.s2 * u[n] * u[m]) / (fact[n] * fact[m]);
            if (n == 1 && m == 1) {
                g += params.gamma_loc;
            }
            spec.gamma_nm[n][m] = g;
        }
    }

    spec.c_nmk.assign((size_t)order * order * (2 * order + 1), 0.0);
    for (int n = 1; n <= order; n++) {
        for (int m = 1; m <= order; m++) {
            for (int k = 2; k <= n + m; k += 2) {
                double alt = 0;
                for (int q = 0; q <= k; q++) {
                    alt += ((q % 2) ? -1.0 : 1.0) * binomial(n, q) * binomial(m, k - q);
                }
                double ik = ((k / 2) % 2) ? -1.0 : 1.0;  // i^k for even k
                spec.c_nmk[c_index(order, n, m, k)] =
                    ik * 2 * (spec.gamma_nm[n][m] * r / 2) * (alt - binomial(n + m, k));
            }
        }
    }
    return spec;
}

std::vector<double> gamma_fluc(
    const PotentialModel &model, std::span<const PhasePoint> centroid, FreqRatio ratio, double s1, double s2) {
    const double r = ratio.r();
    const double pref = std::numbers::pi / 2 / (r * r * r * r);
    std::vector<double> out;
    out.reserve(centroid.size());
    for (const auto &c : centroid) {
        double acc = 0;
        if (s1 != 0) {
            double u2 = model.eval_derivative(2, c.x);
            acc += s1 * u2 * u2;
        }
        if (s2 != 0) {
            double u1 = model.eval_derivative(1, c.x);
            acc += s2 * u1 * u1;
        }
        out.push_back(pref * acc);
    }
    return out;
}

double gamma_fluc_upper_double_well(double d, FreqRatio ratio, double s1, double s2) {
    const double r = ratio.r();
    return std::numbers::pi / 2 / (r * r * r * r) * (25 * s1 + 2 * s2 * d * d);
}

std::vector<double> blurring(
    std::span<const double> eta, std::span<const double> gamma_eff, std::span<const double> tau, FreqRatio ratio) {
    std::vector<double> integrand(tau.size());
    for (size_t i = 0; i < tau.size(); i++) {
        integrand[i] = 4 * ratio.r() * gamma_eff[i] * eta[i] * eta[i];
    }
    return cumulative_trapezoid(integrand, tau);
}

PhasePoint blurring_direction(const Symplectic2 &S, double phi_bar) {
    // R(phi)^T e2 = (-sin phi, cos phi).
    return S * PhasePoint{-std::sin(phi_bar), std::cos(phi_bar)};
}

std::vector<Mat2> blurring_matrix(
    std::span<const double> sigma_b_sq, std::span<const Symplectic2> S, double phi_bar) {
    std::vector<Mat2> out;
    out.reserve(sigma_b_sq.size());
    for (size_t i = 0; i < sigma_b_sq.size(); i++) {
        PhasePoint v = blurring_direction(S[i], phi_bar);
        double s = sigma_b_sq[i];
        out.push_back({s * v.x * v.x, s * v.x * v.p, s * v.p * v.x, s * v.p * v.p});
    }
    return out;
}

}  // namespace wigdyn
