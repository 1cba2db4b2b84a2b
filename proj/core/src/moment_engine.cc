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

#include "wigdyn/moment_engine.h"

#include <algorithm>
#include <cmath>

namespace wigdyn {

Poly2 Poly2::constant(double c) {
    return monomial(0, 0, c);
}

Poly2 Poly2::monomial(int i, int j, double c) {
    Poly2 out;
    out.add_term(i, j, c);
    return out;
}

int Poly2::degree_p() const {
    int d = -1;
    for (const auto &row : c_) {
        d = std::max(d, (int)row.size() - 1);
    }
    return d;
}

bool Poly2::is_zero() const {
    return c_.empty();
}

double Poly2::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i >= (int)c_.size() || j >= (int)c_[i].size()) {
        return 0;
    }
    return c_[i][j];
}

void Poly2::add_term(int i, int j, double c) {
    if (c == 0) {
        return;
    }
    if ((int)c_.size() <= i) {
        c_.resize(i + 1);
    }
    if ((int)c_[i].size() <= j) {
        c_[i].resize(j + 1, 0.0);
    }
    c_[i][j] += c;
}

void Poly2::trim() {
    for (auto &row : c_) {
        while (!row.empty() && row.back() == 0) {
            row.pop_back();
        }
    }
    while (!c_.empty() && c_.back().empty()) {
        c_.pop_back();
    }
}

Poly2 Poly2::operator+(const Poly2 &o) const {
    Poly2 out = *this;
    for (size_t i = 0; i < o.c_.size(); i++) {
        for (size_t j = 0; j < o.c_[i].size(); j++) {
            out.add_term((int)i, (int)j, o.c_[i][j]);
        }
    }
    out.trim();
    return out;
}

Poly2 Poly2::operator-(const Poly2 &o) const {
    return *this + o * -1.0;
}

Poly2 Poly2::operator*(double s) const {
    Poly2 out;
    if (s == 0) {
        return out;
    }
    out.c_ = c_;
    for (auto &row : out.c_) {
        for (auto &v : row) {
            v *= s;
        }
    }
    return out;
}

Poly2 Poly2::operator*(const Poly2 &o) const {
    Poly2 out;
    for (size_t i = 0; i < c_.size(); i++) {
        for (size_t j = 0; j < c_[i].size(); j++) {
            if (c_[i][j] == 0) {
                continue;
            }
            for (size_t a = 0; a < o.c_.size(); a++) {
                for (size_t b = 0; b < o.c_[a].size(); b++) {
                    out.add_term((int)(i + a), (int)(j + b), c_[i][j] * o.c_[a][b]);
                }
            }
        }
    }
    out.trim();
    return out;
}

Poly2 Poly2::dp(int k) const {
    Poly2 out;
    for (size_t i = 0; i < c_.size(); i++) {
        for (size_t j = k; j < c_[i].size(); j++) {
            double f = 1;
            for (int q = 0; q < k; q++) {
                f *= (double)(j - q);
            }
            out.add_term((int)i, (int)(j - k), c_[i][j] * f);
        }
    }
    out.trim();
    return out;
}

Poly2 Poly2::times_x(int k) const {
    Poly2 out;
    if (is_zero()) {
        return out;
    }
    out.c_.resize(k);
    out.c_.insert(out.c_.end(), c_.begin(), c_.end());
    return out;
}

namespace {

// sum c_ij X^i P^j with cached powers.
Poly2 compose(const std::vector<std::vector<double>> &c, const Poly2 &X, const Poly2 &P, int dx, int dp) {
    std::vector<Poly2> xp(dx + 1), pp(dp + 1);
    xp[0] = Poly2::constant(1);
    pp[0] = Poly2::constant(1);
    for (int i = 1; i <= dx; i++) {
        xp[i] = xp[i - 1] * X;
    }
    for (int j = 1; j <= dp; j++) {
        pp[j] = pp[j - 1] * P;
    }
    Poly2 out;
    for (size_t i = 0; i < c.size(); i++) {
        Poly2 row;
        for (size_t j = 0; j < c[i].size(); j++) {
            if (c[i][j] != 0) {
                row = row + pp[j] * c[i][j];
            }
        }
        if (!row.is_zero()) {
            out = out + xp[i] * row;
        }
    }
    return out;
}

}  // namespace

Poly2 Poly2::linear_substitute(const Mat2 &m) const {
    Poly2 X = monomial(1, 0, m.xx) + monomial(0, 1, m.xp);
    Poly2 P = monomial(1, 0, m.px) + monomial(0, 1, m.pp);
    return compose(c_, X, P, degree_x(), degree_p());
}

Poly2 Poly2::shift(PhasePoint s) const {
    Poly2 X = monomial(1, 0) + constant(s.x);
    Poly2 P = monomial(0, 1) + constant(s.p);
    return compose(c_, X, P, degree_x(), degree_p());
}

Poly2 Poly2::shear_p(const std::vector<double> &k) const {
    Poly2 P = monomial(0, 1);
    for (size_t a = 0; a < k.size(); a++) {
        P.add_term((int)a, 0, -k[a]);
    }
    P.trim();
    return compose(c_, monomial(1, 0), P, degree_x(), degree_p());
}

double Poly2::eval(PhasePoint r) const {
    double acc = 0;
    for (size_t i = 0; i < c_.size(); i++) {
        double row = 0;
        for (size_t j = c_[i].size(); j-- > 0;) {
            row = row * r.p + c_[i][j];
        }
        acc += row * std::pow(r.x, (double)i);
    }
    return acc;
}

namespace {

// T[a][b] = E[x^a p^b], via Stein's identity
// E[x^a p^b] = (a-1) Cxx E[x^(a-2) p^b] + b Cxp E[x^(a-1) p^(b-1)].
std::vector<std::vector<double>> moment_table(int A, int B, const Mat2 &cov) {
    std::vector<std::vector<double>> t(A + 1, std::vector<double>(B + 1, 0.0));
    for (int b = 0; b <= B; b += 2) {
        t[0][b] = (b == 0) ? 1.0 : t[0][b - 2] * (double)(b - 1) * cov.pp;
    }
    for (int a = 1; a <= A; a++) {
        for (int b = 0; b <= B; b++) {
            double v = 0;
            if (a >= 2) {
                v += (double)(a - 1) * cov.xx * t[a - 2][b];
            }
            if (b >= 1) {
                v += (double)b * cov.xp * t[a - 1][b - 1];
            }
            t[a][b] = v;
        }
    }
    return t;
}

}  // namespace

double gaussian_moment(int a, int b, const Mat2 &cov) {
    return moment_table(a, b, cov)[a][b];
}

double Poly2::gaussian_expectation(const Mat2 &cov) const {
    if (is_zero()) {
        return 0;
    }
    auto t = moment_table(degree_x(), std::max(degree_p(), 0), cov);
    double acc = 0;
    for (size_t i = 0; i < c_.size(); i++) {
        for (size_t j = 0; j < c_[i].size(); j++) {
            acc += c_[i][j] * t[i][j];
        }
    }
    return acc;
}

namespace {

double factorial(int n) {
    return std::tgamma((double)n + 1);
}

// exp(sum_t op_t) g where every op_t lowers the p degree.
Poly2 exp_lowering(const Poly2 &g, const std::vector<std::pair<Poly2, int>> &ops) {
    Poly2 out = g, term = g;
    for (int q = 1; !term.is_zero(); q++) {
        Poly2 next;
        for (const auto &[mult, order] : ops) {
            Poly2 d = term.dp(order);
            if (!d.is_zero()) {
                next = next + mult * d;
            }
        }
        term = next * (1.0 / q);
        out = out + term;
    }
    return out;
}

}  // namespace

Poly2 pull_back(const Poly2 &f, const SegmentMap &seg) {
    Mat2 R = Mat2::rotation(seg.phi_bar);
    Poly2 g = f.linear_substitute(R.transpose());

    std::vector<double> k;
    std::vector<std::pair<Poly2, int>> ops;
    for (const auto &[n, kap] : seg.kappa) {
        if (kap == 0) {
            continue;
        }
        if ((int)k.size() < n) {
            k.resize(n, 0.0);
        }
        k[n - 1] += kap;
        if (seg.classical) {
            continue;
        }
        // The adjoint of d^(2j+1)/dp^(2j+1) flips its sign.
        for (int j = 1; 2 * j + 1 <= n - 1; j++) {
            double c = factorial(n - 1) / (factorial(2 * j + 1) * factorial(n - 2 * j - 1));
            double sign = (j % 2) ? 1.0 : -1.0;
            ops.emplace_back(Poly2::monomial(n - 2 * j - 1, 0, sign * kap * c), 2 * j + 1);
        }
    }
    if (!k.empty()) {
        g = g.shear_p(k);
    }
    if (!ops.empty()) {
        g = exp_lowering(g, ops);
    }
    if (seg.sigma_sq != 0) {
        g = exp_lowering(g, {{Poly2::constant(seg.sigma_sq / 2), 2}});
    }
    return g.linear_substitute(R);
}

GaussianMoments gaussian_frame_moments(const std::vector<SegmentMap> &segments, const GaussianMoments &initial) {
    auto expect = [&](Poly2 f) {
        for (size_t s = segments.size(); s-- > 0;) {
            f = pull_back(f, segments[s]);
        }
        return f.shift(initial.mean).gaussian_expectation(initial.cov);
    };
    GaussianMoments out;
    out.mean = {expect(Poly2::monomial(1, 0)), expect(Poly2::monomial(0, 1))};
    // Centred observables keep the large Gaussian-frame means out of the
    // subtraction.
    Poly2 dx = Poly2::monomial(1, 0) - Poly2::constant(out.mean.x);
    Poly2 dp = Poly2::monomial(0, 1) - Poly2::constant(out.mean.p);
    double xx = expect(dx * dx);
    double xp = expect(dx * dp);
    double pp = expect(dp * dp);
    out.cov = {xx, xp, xp, pp};
    return out;
}

}  // namespace wigdyn
