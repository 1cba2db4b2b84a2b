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

#include "wigdyn/analytic_wigner.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <sstream>

#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"
#include "wigdyn/special_functions.h"

namespace wigdyn {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Angles.

AngleChoice choose_angle(const FrameRecord &frames, double tau_begin, double tau_end) {
    size_t i0 = frames.index_near(tau_begin), i1 = frames.index_near(tau_end);
    if (i1 <= i0) {
        throw Error(ErrorKind::DomainError, "angle segment is empty");
    }
    size_t best = i0;
    double lo = frames.eta[i0];
    for (size_t i = i0; i <= i1; i++) {
        if (frames.eta[i] > frames.eta[best]) {
            best = i;
        }
        lo = std::min(lo, frames.eta[i]);
    }
    AngleChoice out;
    double hi = frames.eta[best];
    if (hi - lo <= 1e-12 * hi) {
        double mid = 0.5 * (frames.tau[i0] + frames.tau[i1]);
        size_t k = frames.index_near(mid);
        out = {frames.phi[k], frames.tau[k], true};
        return out;
    }
    out = {frames.phi[best], frames.tau[best], best == i0 || best == i1};
    return out;
}

void AngleSchedule::validate(double tau_end) const {
    if (segments.empty()) {
        throw Error(ErrorKind::DomainError, "angle schedule has no segments");
    }
    if (std::abs(delta) >= 0.1) {
        throw Error(ErrorKind::DomainError, "second-segment offset must satisfy |delta| < 0.1");
    }
    if (segments.front().tau_start != 0) {
        throw Error(ErrorKind::DomainError, "angle schedule must start at tau = 0");
    }
    for (size_t k = 0; k < segments.size(); k++) {
        if (!(segments[k].tau_end > segments[k].tau_start)) {
            throw Error(ErrorKind::DomainError, "angle segment has nonpositive length");
        }
        if (k > 0 && segments[k].tau_start != segments[k - 1].tau_end) {
            throw Error(ErrorKind::DomainError, "angle segments are not contiguous");
        }
    }
    if (std::abs(segments.back().tau_end - tau_end) > 1e-12 * std::max(1.0, tau_end)) {
        throw Error(ErrorKind::DomainError, "angle schedule does not reach the end time");
    }
}

size_t AngleSchedule::segment_index(double tau) const {
    for (size_t k = 0; k + 1 < segments.size(); k++) {
        if (tau <= segments[k].tau_end) {
            return k;
        }
    }
    return segments.size() - 1;
}

double AngleSchedule::phi_bar_at(double tau) const {
    return segments[segment_index(tau)].phi_bar;
}

AngleSchedule auto_schedule(const FrameRecord &frames, double tau_end, double delta, AngleChoice *first) {
    AngleSchedule s;
    s.delta = delta;
    // Without nonlinearity there is nothing to refocus: the state stays a
    // thawed Gaussian and one segment covers the run.
    bool linear = std::all_of(frames.kappa.begin(), frames.kappa.end(), [](const auto &kv) {
        return std::all_of(kv.second.begin(), kv.second.end(), [](double v) { return v == 0; });
    });
    std::optional<double> turn;
    for (double t : linear ? std::vector<double>{} : frames.trajectory.turning_points) {
        if (t > frames.tau.front() && t < tau_end) {
            turn = t;
            break;
        }
    }
    double end1 = turn.value_or(tau_end);
    AngleChoice c = choose_angle(frames, 0, end1);
    if (first) {
        *first = c;
    }
    s.segments.push_back({0, end1, c.phi_bar});
    if (turn) {
        s.segments.push_back({end1, tau_end, c.phi_bar + kPi + delta});
    }
    s.validate(tau_end);
    return s;
}

// ---------------------------------------------------------------------------
// Moments.

std::vector<SegmentMap> segment_maps_at(
    const FrameRecord &frames,
    const AngleSchedule &schedule,
    std::span<const double> sigma_sq_cumulative,
    double tau,
    bool classical) {
    std::vector<SegmentMap> out;
    for (size_t k = 0; k < schedule.segments.size(); k++) {
        const auto &seg = schedule.segments[k];
        if (k > 0 && tau <= seg.tau_start) {
            break;
        }
        double t1 = std::min(tau, seg.tau_end);
        SegmentMap m;
        m.phi_bar = seg.phi_bar;
        m.classical = classical;
        for (const auto &[n, series] : frames.kappa) {
            m.kappa[n] = frames.kappa_between(n, seg.tau_start, t1);
        }
        if (!sigma_sq_cumulative.empty()) {
            m.sigma_sq = interp_linear(frames.tau, sigma_sq_cumulative, t1) -
                         interp_linear(frames.tau, sigma_sq_cumulative, seg.tau_start);
        }
        out.push_back(std::move(m));
    }
    return out;
}

namespace {

struct FrameAt {
    Symplectic2 S;
    PhasePoint r_cl;
};

FrameAt frame_at(const FrameRecord &frames, double tau) {
    size_t k = frames.index_near(tau);
    if (std::abs(frames.tau[k] - tau) <= 1e-12 * std::max(1.0, std::abs(tau))) {
        return {frames.S[k], frames.centroid[k]};
    }
    auto it = std::upper_bound(frames.tau.begin(), frames.tau.end(), tau);
    size_t hi = std::clamp<size_t>(it - frames.tau.begin(), 1, frames.size() - 1);
    size_t lo = hi - 1;
    double w = (tau - frames.tau[lo]) / (frames.tau[hi] - frames.tau[lo]);
    return {frames.S[lo] * (1 - w) + frames.S[hi] * w, frames.centroid[lo] * (1 - w) + frames.centroid[hi] * w};
}

}  // namespace

std::vector<GaussianMoments> schedule_moments(
    const FrameRecord &frames,
    const AngleSchedule &schedule,
    std::span<const double> sigma_sq_cumulative,
    const GaussianMoments &initial,
    std::span<const double> taus) {
    GaussianMoments initial_g{initial.mean - frames.centroid.front(), initial.cov};
    std::vector<GaussianMoments> out;
    out.reserve(taus.size());
    for (double t : taus) {
        auto maps = segment_maps_at(frames, schedule, sigma_sq_cumulative, t);
        GaussianMoments g = gaussian_frame_moments(maps, initial_g);
        FrameAt f = frame_at(frames, t);
        out.push_back({f.r_cl + f.S * g.mean, congruence(f.S, g.cov)});
    }
    return out;
}

PhasePoint approx_first_moment(
    const Symplectic2 &S,
    PhasePoint r_cl,
    const std::map<int, double> &kappa,
    double phi_bar,
    const GaussianMoments &initial_g) {
    Mat2 R = Mat2::rotation(phi_bar);
    Mat2 c = congruence(R, initial_g.cov);
    double shift = 0;
    for (const auto &[n, k] : kappa) {
        shift += k * gaussian_moment(n - 1, 0, c);
    }
    return r_cl + S * (R.transpose() * PhasePoint{0, -shift});
}

Mat2 approx_covariance(
    const Symplectic2 &S,
    const std::map<int, double> &kappa,
    double phi_bar,
    const Mat2 &sigma_b,
    const GaussianMoments &initial_g,
    bool *psd) {
    Mat2 R = Mat2::rotation(phi_bar);
    Mat2 c = congruence(R, initial_g.cov);
    double xp = c.xp, pp = c.pp;
    for (const auto &[n, k] : kappa) {
        xp -= k * gaussian_moment(n, 0, c);
        pp -= 2 * k * gaussian_moment(n - 1, 1, c);
        for (const auto &[m, l] : kappa) {
            pp += k * l * (gaussian_moment(n + m - 2, 0, c) - gaussian_moment(n - 1, 0, c) * gaussian_moment(m - 1, 0, c));
        }
    }
    Mat2 rotated{c.xx, xp, xp, pp};
    Mat2 out = congruence(S * R.transpose(), rotated) + sigma_b;
    if (psd) {
        double scale = std::abs(out.xx) + std::abs(out.pp);
        *psd = out.xx >= 0 && out.pp >= 0 && out.det() >= -1e-12 * scale * scale;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wigner functions.

double segment1_wigner(double x, double p, const CubicPhaseParams &q) {
    double v = 2 * q.n_bar + 1;
    double g = std::exp(-x * x / (2 * v)) / std::sqrt(2 * kPi * v);
    if (g == 0) {
        return 0;
    }
    double c3 = q.kappa3 + 3 * q.kappa4 * x;
    double c1 = p + q.kappa3 * x * x + q.kappa4 * x * x * x;
    return g * gauss_airy_integral(c3, v + q.sigma_sq, c1);
}

WignerGrid analytic_wigner_segment1(const GridWindow &window, const CubicPhaseParams &params) {
    WignerGrid g;
    g.window = window;
    g.frame = FrameTag::Gaussian;
    g.values.resize(window.nx * window.np);
    for (size_t i = 0; i < window.nx; i++) {
        double x = window.x(i);
        for (size_t j = 0; j < window.np; j++) {
            g.at(i, j) = segment1_wigner(x, window.p(j), params);
        }
    }
    return g;
}

double SegmentOneState::operator()(PhasePoint r_g) const {
    PhasePoint r = Mat2::rotation(phi_bar_) * r_g;
    return segment1_wigner(r.x, r.p, params_);
}

namespace {

// Weights of the cubic Lagrange interpolant through nodes -1, 0, 1, 2.
void lagrange4(double t, double w[4]) {
    w[0] = -t * (t - 1) * (t - 2) / 6;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2;
    w[2] = -(t + 1) * t * (t - 2) / 2;
    w[3] = (t + 1) * t * (t - 1) / 6;
}

}  // namespace

double ComposedState::operator()(PhasePoint r_g) const {
    PhasePoint r = Mat2::rotation(phi_bar2_) * r_g;
    const auto &w = grid_.window;
    double fx = (r.x - w.x_min) / w.dx(), fp = (r.p - w.p_min) / w.dp();
    if (!(fx >= 0 && fp >= 0 && fx <= (double)(w.nx - 1) && fp <= (double)(w.np - 1))) {
        return 0;
    }
    // Stencils are shifted inwards at the edges, where the state is ~0.
    long i = std::clamp((long)fx, 1L, (long)w.nx - 3), j = std::clamp((long)fp, 1L, (long)w.np - 3);
    double wx[4], wp[4];
    lagrange4(fx - (double)i, wx);
    lagrange4(fp - (double)j, wp);
    double acc = 0;
    for (int a = 0; a < 4; a++) {
        double row = 0;
        for (int b = 0; b < 4; b++) {
            row += wp[b] * grid_.at((size_t)(i - 1 + a), (size_t)(j - 1 + b));
        }
        acc += wx[a] * row;
    }
    return acc;
}

namespace {

double factorial(int n) {
    return std::tgamma((double)n + 1);
}

// Odd-power part of the second-segment multiplier beyond the shear:
// sum_n kappa_n sum_{j>=1} C(n, 2j+1)/n x^(n-2j-1) k^(2j+1).
double multiplier_phase(const std::map<int, double> &kappa, double x, double k) {
    double acc = 0;
    for (const auto &[n, kap] : kappa) {
        for (int j = 1; 2 * j + 1 <= n; j++) {
            double c = factorial(n - 1) / (factorial(2 * j + 1) * factorial(n - 2 * j - 1));
            acc += kap * c * std::pow(x, n - 2 * j - 1) * std::pow(k, 2 * j + 1);
        }
    }
    return acc;
}

double multiplier_group_delay(const std::map<int, double> &kappa, double x, double k) {
    double acc = 0;
    for (const auto &[n, kap] : kappa) {
        for (int j = 1; 2 * j + 1 <= n; j++) {
            double c = factorial(n - 1) / (factorial(2 * j + 1) * factorial(n - 2 * j - 1));
            acc += kap * c * std::pow(x, n - 2 * j - 1) * (2 * j + 1) * std::pow(k, 2 * j);
        }
    }
    return std::abs(acc);
}

double shear(const std::map<int, double> &kappa, double x) {
    double acc = 0;
    for (const auto &[n, kap] : kappa) {
        acc += kap * std::pow(x, n - 1);
    }
    return acc;
}

double lagrange4(const std::vector<cplx> &f, double s0, double ds, double s) {
    double u = (s - s0) / ds;
    long i = (long)std::floor(u) - 1;
    if (i < 0 || i + 3 >= (long)f.size()) {
        return 0;
    }
    double t = u - (double)(i + 1);
    double w0 = -t * (t - 1) * (t - 2) / 6, w1 = (t + 1) * (t - 1) * (t - 2) / 2;
    double w2 = -(t + 1) * t * (t - 2) / 2, w3 = (t + 1) * t * (t - 1) / 6;
    return w0 * f[i].real() + w1 * f[i + 1].real() + w2 * f[i + 2].real() + w3 * f[i + 3].real();
}

struct FftwPlan {
    fftw_complex *buf = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;
    explicit FftwPlan(size_t n) {
        buf = fftw_alloc_complex(n);
        fwd = fftw_plan_dft_1d((int)n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d((int)n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftwPlan() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftwPlan(const FftwPlan &) = delete;
    FftwPlan &operator=(const FftwPlan &) = delete;
};

struct RowRange {
    double lo = 0, hi = -1;
    bool empty() const {
        return hi < lo;
    }
};

}  // namespace

ComposedState compose_segments(const SegmentOneState &first, const SegmentTwoParams &second, const ComposeOptions &opt) {
    const CubicPhaseParams &P = first.params();
    const double v = 2 * P.n_bar + 1;
    const double c2 = v + P.sigma_sq;
    const Mat2 M = Mat2::rotation(first.phi_bar() - second.phi_bar);  // r1 = M r2

    GridWindow win = opt.window;
    if (win.nx == 0 || win.np == 0) {
        SegmentMap m1;
        m1.phi_bar = first.phi_bar();
        m1.kappa = {{3, P.kappa3}, {4, P.kappa4}};
        m1.sigma_sq = P.sigma_sq;
        SegmentMap m2;
        m2.phi_bar = second.phi_bar;
        m2.kappa = second.kappa;
        m2.sigma_sq = second.sigma_sq;
        m2.classical = second.classical;
        GaussianMoments g = gaussian_frame_moments({m1, m2}, GaussianMoments::thermal(P.n_bar));
        Mat2 R2 = Mat2::rotation(second.phi_bar);
        PhasePoint mu = R2 * g.mean;
        Mat2 c = congruence(R2, g.cov);
        double hx = 8 * std::sqrt(std::max(c.xx, 1e-12)), hp = 8 * std::sqrt(std::max(c.pp, 1e-12));
        win = {mu.x - hx, mu.x + hx, opt.nx, mu.p - hp, mu.p + hp, opt.np};
    }
    if (win.nx < 2 || win.np < 2) {
        throw Error(ErrorKind::DomainError, "composition window needs at least 2 x 2 points");
    }

    // Extent of the first-segment state: |x1| <= lx, |c1| <= cmax.
    const double ef = opt.tail_efolds;
    const double lx = std::sqrt(2 * ef * v);
    double c3max = std::max(std::abs(P.kappa3 + 3 * P.kappa4 * lx), std::abs(P.kappa3 - 3 * P.kappa4 * lx));
    double kmax = std::sqrt(2 * ef / c2);
    double cmax = std::max({12 * std::sqrt(c2), 12 * std::cbrt(c3max), 2 * ef * c3max / c2});
    double kshear = 0;
    for (double x1 : linspace(-lx, lx, 257)) {
        kshear = std::max(kshear, std::abs(2 * P.kappa3 * x1 + 3 * P.kappa4 * x1 * x1));
    }
    // Highest spatial frequency of the row function.
    double krow = kmax * (std::abs(M.pp) + kshear * std::abs(M.xp)) + std::abs(M.xp) * 2 * ef / std::sqrt(v) + 1e-12;
    const double ds = kPi / (2 * krow);

    auto x1_of = [&](double x2, double s) { return M.xx * x2 + M.xp * s; };
    auto c1_of = [&](double x2, double s) {
        double x1 = x1_of(x2, s);
        return M.px * x2 + M.pp * s + P.kappa3 * x1 * x1 + P.kappa4 * x1 * x1 * x1;
    };
    // Stationary points of c1 along a row depend on x1 only:
    // M.pp + M.xp (2 kappa3 x1 + 3 kappa4 x1^2) = 0.
    std::vector<double> x1_stationary;
    if (std::abs(M.xp) > 1e-300) {
        double qa = 3 * P.kappa4 * M.xp, qb = 2 * P.kappa3 * M.xp, qc = M.pp;
        if (qa != 0) {
            double disc = qb * qb - 4 * qa * qc;
            if (disc >= 0) {
                x1_stationary.push_back((-qb + std::sqrt(disc)) / (2 * qa));
                x1_stationary.push_back((-qb - std::sqrt(disc)) / (2 * qa));
            }
        } else if (qb != 0) {
            x1_stationary.push_back(-qc / qb);
        }
    }
    auto inside = [&](double x2, double a, double b) {
        double cmin = std::min(c1_of(x2, a), c1_of(x2, b));
        double cmx = std::max(c1_of(x2, a), c1_of(x2, b));
        for (double x1 : x1_stationary) {
            double s = (x1 - M.xx * x2) / M.xp;
            if (s > a && s < b) {
                cmin = std::min(cmin, c1_of(x2, s));
                cmx = std::max(cmx, c1_of(x2, s));
            }
        }
        double xa = x1_of(x2, a), xb = x1_of(x2, b);
        return cmin <= cmax && cmx >= -cmax && std::min(xa, xb) <= lx && std::max(xa, xb) >= -lx;
    };

    // Support of the row function by recursive subdivision of the interval
    // allowed by the x1 and momentum bounds.
    auto row_support = [&](double x2) {
        RowRange out;
        double a, b;
        if (std::abs(M.xp) > 1e-300) {
            a = (-lx - M.xx * x2) / M.xp;
            b = (lx - M.xx * x2) / M.xp;
        } else {
            double x1 = M.xx * x2;
            if (std::abs(x1) > lx) {
                return out;
            }
            double base = M.px * x2 + P.kappa3 * x1 * x1 + P.kappa4 * x1 * x1 * x1;
            a = (-cmax - base) / M.pp;
            b = (cmax - base) / M.pp;
        }
        if (a > b) {
            std::swap(a, b);
        }
        if (std::abs(M.pp) > 1e-300) {
            double far = (cmax + std::abs(M.px * x2) + std::abs(P.kappa3) * lx * lx +
                          std::abs(P.kappa4) * lx * lx * lx) /
                         std::abs(M.pp);
            a = std::max(a, -far);
            b = std::min(b, far);
        }
        if (!(b > a) || !inside(x2, a, b)) {
            return out;
        }
        const double target = 16 * ds;
        std::vector<std::pair<double, double>> live{{a, b}};
        for (int iter = 0; iter < 64; iter++) {
            std::vector<std::pair<double, double>> next;
            for (const auto &[lo, hi] : live) {
                if (hi - lo <= target) {
                    next.emplace_back(lo, hi);
                    continue;
                }
                const int pieces = 64;
                double h = (hi - lo) / pieces;
                for (int k = 0; k < pieces; k++) {
                    double p0 = lo + h * k, p1 = (k + 1 == pieces) ? hi : p0 + h;
                    if (inside(x2, p0, p1)) {
                        next.emplace_back(p0, p1);
                    }
                }
            }
            std::vector<std::pair<double, double>> merged;
            for (const auto &iv : next) {
                if (!merged.empty() && iv.first <= merged.back().second) {
                    merged.back().second = std::max(merged.back().second, iv.second);
                } else {
                    merged.push_back(iv);
                }
            }
            if (merged.empty()) {
                return out;
            }
            if (merged.size() > 4096) {
                throw Error(ErrorKind::NotConvergent, "row support of the composed state is fragmented");
            }
            bool same = merged == live;
            live = std::move(merged);
            if (same) {
                break;
            }
        }
        out.lo = live.front().first;
        out.hi = live.back().second;
        return out;
    };

    // Kernel reach of the second-segment multiplier.
    std::vector<double> x2s = win.x_axis();
    double reach = 10 * std::sqrt(std::max(second.sigma_sq, 0.0)) + 16 * ds;
    if (!second.classical) {
        double gd = 0;
        for (double x2 : {win.x_min, 0.5 * (win.x_min + win.x_max), win.x_max}) {
            for (double k : linspace(0, kmax, 65)) {
                gd = std::max(gd, multiplier_group_delay(second.kappa, x2, k));
            }
        }
        reach += gd;
    }

    std::vector<RowRange> support(win.nx);
    std::vector<double> row_lo(win.nx), row_hi(win.nx);
    double longest = 0;
    for (size_t i = 0; i < win.nx; i++) {
        double x2 = x2s[i];
        support[i] = row_support(x2);
        double k2 = shear(second.kappa, x2);
        double qlo = win.p_min + k2, qhi = win.p_max + k2;
        double lo = qlo, hi = qhi;
        if (!support[i].empty()) {
            lo = std::min(lo, support[i].lo);
            hi = std::max(hi, support[i].hi);
        }
        row_lo[i] = lo - reach;
        row_hi[i] = hi + reach;
        longest = std::max(longest, row_hi[i] - row_lo[i]);
    }
    size_t n = next_pow2((size_t)std::ceil(longest / ds) + 8);
    if (n > opt.max_row_length) {
        std::ostringstream ss;
        ss << "composition needs rows of " << n << " samples (limit " << opt.max_row_length << ")";
        throw Error(ErrorKind::GridOverflow, ss.str());
    }

    FftwPlan plan(n);
    std::vector<cplx> row(n);
    std::vector<double> kgrid(n);
    for (size_t m = 0; m < n; m++) {
        long mm = (m < n / 2) ? (long)m : (long)m - (long)n;
        kgrid[m] = 2 * kPi * (double)mm / ((double)n * ds);
    }

    WignerGrid out;
    out.window = win;
    out.frame = FrameTag::Gaussian;
    out.values.assign(win.nx * win.np, 0.0);
    for (size_t i = 0; i < win.nx; i++) {
        double x2 = x2s[i];
        if (support[i].empty()) {
            continue;
        }
        double s0 = row_lo[i];
        auto *b = reinterpret_cast<cplx *>(plan.buf);
        for (size_t m = 0; m < n; m++) {
            double s = s0 + ds * (double)m;
            double val = 0;
            if (s >= support[i].lo && s <= support[i].hi) {
                PhasePoint r1 = M * PhasePoint{x2, s};
                val = segment1_wigner(r1.x, r1.p, P);
            }
            b[m] = val;
        }
        fftw_execute(plan.fwd);
        for (size_t m = 0; m < n; m++) {
            double k = kgrid[m];
            double ph = second.classical ? 0 : multiplier_phase(second.kappa, x2, k);
            double damp = std::exp(-0.5 * second.sigma_sq * k * k) / (double)n;
            b[m] *= std::polar(damp, ph);
        }
        fftw_execute(plan.bwd);
        std::copy(b, b + n, row.begin());
        double k2 = shear(second.kappa, x2);
        for (size_t j = 0; j < win.np; j++) {
            out.at(i, j) = lagrange4(row, s0, ds, win.p(j) + k2);
        }
    }
    // Every step above keeps the norm, so lost or gained mass means the
    // window or its sampling does not resolve the state.
    double mass = out.integral();
    if (!(std::abs(mass - 1) <= opt.mass_tolerance)) {
        std::ostringstream ss;
        ss << "composed grid holds mass " << mass << "; the window does not resolve the state";
        throw Error(ErrorKind::NotConvergent, ss.str());
    }
    return ComposedState(second.phi_bar, std::move(out));
}

WignerGrid to_lab_frame(
    const GaussianFrameState &state,
    const Symplectic2 &S,
    PhasePoint r_cl,
    const GridWindow &window,
    FrameTag frame,
    double tau) {
    if (std::abs(S.det() - 1) > 1e-9) {
        throw Error(ErrorKind::DomainError, "frame map is not symplectic");
    }
    Mat2 inv = S.symplectic_inverse();
    PhasePoint origin = (frame == FrameTag::Lab) ? r_cl : PhasePoint{};
    WignerGrid g;
    g.window = window;
    g.frame = frame;
    g.tau = tau;
    g.values.resize(window.nx * window.np);
    for (size_t i = 0; i < window.nx; i++) {
        for (size_t j = 0; j < window.np; j++) {
            PhasePoint r{window.x(i), window.p(j)};
            PhasePoint rg = (frame == FrameTag::Gaussian) ? r : inv * (r - origin);
            g.at(i, j) = state(rg);
        }
    }
    return g;
}

GridWindow auto_window(double eta, PhasePoint mean_offset, const Mat2 &cov, size_t nx, size_t np) {
    double hx = std::max(10 * eta, 50.0);
    double hp = std::max(10 * std::sqrt(std::max(cov.pp, 0.0)), 10.0);
    return {mean_offset.x - hx, mean_offset.x + hx, nx, mean_offset.p - hp, mean_offset.p + hp, np};
}

// ---------------------------------------------------------------------------
// Marginals.

namespace {

std::vector<double> trapezoid_weights(std::span<const double> x) {
    std::vector<double> w(x.size(), 0.0);
    for (size_t i = 0; i + 1 < x.size(); i++) {
        double h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

void normalize(std::span<const double> x, std::vector<double> &f) {
    auto w = trapezoid_weights(x);
    double mass = 0;
    for (size_t i = 0; i < f.size(); i++) {
        mass += w[i] * f[i];
    }
    if (mass > 0) {
        for (double &v : f) {
            v /= mass;
        }
    }
}

// |int dy exp(i (al y^3 + be y^2 + ga y))|^2 by the trapezoid rule, with
// Im be > 0 providing the Gaussian decay.
double cubic_integral_sq(double al, cplx be, double ga) {
    const double ymax = std::sqrt(4 * 45 / (4 * be.imag()));
    double slope = 3 * std::abs(al) * ymax * ymax + 2 * std::abs(be.real()) * ymax + std::abs(ga);
    size_t n = std::max<size_t>(512, (size_t)std::ceil(2 * ymax * slope / 0.25));
    cplx prev = 0;
    for (int pass = 0; pass < 6; pass++) {
        double h = 2 * ymax / (double)n;
        cplx acc = 0;
        for (size_t k = 0; k <= n; k++) {
            double y = -ymax + h * (double)k;
            acc += std::exp(cplx(0, 1) * (al * y * y * y + be * y * y + ga * y));
        }
        acc *= h;
        if (pass > 0 && std::abs(acc - prev) <= 1e-12 * std::max(std::abs(acc), 1e-300)) {
            return std::norm(acc);
        }
        prev = acc;
        n *= 2;
    }
    return std::norm(prev);
}

}  // namespace

std::vector<double> position_marginal_coherent(
    std::span<const double> x, const Symplectic2 &S, double phi_bar, double kappa3, PhasePoint r_cl) {
    Mat2 A = S * Mat2::rotation(phi_bar).transpose();
    const double a = A.xx, b = A.xp;
    std::vector<double> out(x.size());
    if (std::abs(b) < 1e-12 * std::max(1.0, std::abs(a))) {
        // A maps positions to positions: the density is |psi(x/a)|^2 / |a|.
        for (size_t i = 0; i < x.size(); i++) {
            double u = (x[i] - r_cl.x) / a;
            out[i] = std::exp(-u * u / 2);
        }
        normalize(x, out);
        return out;
    }
    const double al = -kappa3 / 6;
    const cplx be(a / (4 * b), 0.25);
    const bool airy_form = al != 0 && std::abs(be * be * be) / (27 * al * al) < 1e6;
    std::vector<double> logp(x.size());
    for (size_t i = 0; i < x.size(); i++) {
        double ga = -(x[i] - r_cl.x) / (2 * b);
        if (airy_form) {
            // Shift y -> t - be / (3 al) removes the quadratic term.
            double c = std::cbrt(3 * al);
            cplx z = (ga - be * be / (3 * al)) / c;
            cplx phase = cplx(0, 1) * (2.0 * be * be * be / (27 * al * al) - ga * be / (3 * al));
            ScaledComplex ai = airy_ai_scaled(z);
            logp[i] = 2 * (phase.real() + std::log(std::abs(ai.mantissa)) + ai.log_scale);
        } else {
            logp[i] = std::log(cubic_integral_sq(al, be, ga));
        }
    }
    double top = *std::max_element(logp.begin(), logp.end());
    for (size_t i = 0; i < x.size(); i++) {
        out[i] = std::isfinite(logp[i]) ? std::exp(logp[i] - top) : 0.0;
    }
    normalize(x, out);
    return out;
}

std::vector<double> position_marginal_decohered(
    std::span<const double> x, std::span<const double> density, double c_b_xx) {
    if (c_b_xx < 0) {
        throw Error(ErrorKind::DomainError, "blurring variance must be nonnegative");
    }
    std::vector<double> out(density.begin(), density.end());
    if (c_b_xx == 0) {
        return out;
    }
    auto w = trapezoid_weights(x);
    std::fill(out.begin(), out.end(), 0.0);
    const size_t n = x.size();
    std::vector<double> col(n);
    for (size_t j = 0; j < n; j++) {
        if (density[j] == 0) {
            continue;
        }
        double norm = 0;
        for (size_t i = 0; i < n; i++) {
            double u = x[i] - x[j];
            col[i] = std::exp(-u * u / (2 * c_b_xx));
            norm += w[i] * col[i];
        }
        double scale = w[j] * density[j] / norm;
        for (size_t i = 0; i < n; i++) {
            out[i] += scale * col[i];
        }
    }
    return out;
}

std::vector<double> position_marginal_composed(
    const ComposedState &state, const Symplectic2 &S, PhasePoint r_cl, std::span<const double> x) {
    if (x.size() < 2) {
        throw Error(ErrorKind::DomainError, "marginal axis needs at least two points");
    }
    // For each lab x the line of constant x, parametrised by lab p, is a
    // straight line through the rotated grid: r2 = M (x - x_c, p - p_c).
    Mat2 M = Mat2::rotation(state.phi_bar2()) * S.symplectic_inverse();
    const auto &w = state.rotated_grid().window;
    PhasePoint dir{M.xp, M.pp};
    // Half a grid cell per step along the line.
    double per_p = std::max(std::abs(dir.x) / w.dx(), std::abs(dir.p) / w.dp());
    double hp = 0.5 / per_p;
    std::vector<double> out(x.size(), 0.0);
    for (size_t k = 0; k < x.size(); k++) {
        PhasePoint base{M.xx * (x[k] - r_cl.x), M.px * (x[k] - r_cl.x)};
        // Parameter interval where the line is inside the window.
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        auto clip = [&](double b, double d, double mn, double mx) {
            if (d == 0) {
                if (b < mn || b > mx) {
                    lo = 1, hi = 0;
                }
                return;
            }
            double t0 = (mn - b) / d, t1 = (mx - b) / d;
            lo = std::max(lo, std::min(t0, t1));
            hi = std::min(hi, std::max(t0, t1));
        };
        clip(base.x, dir.x, w.x_min, w.x_max);
        clip(base.p, dir.p, w.p_min, w.p_max);
        if (!(hi > lo)) {
            continue;
        }
        size_t n = (size_t)std::ceil((hi - lo) / hp);
        double h = (hi - lo) / (double)n;
        double acc = 0;
        for (size_t m = 0; m <= n; m++) {
            double t = lo + h * (double)m;
            double v = state(Mat2::rotation(state.phi_bar2()).transpose() * PhasePoint{base.x + dir.x * t, base.p + dir.p * t});
            acc += (m == 0 || m == n) ? 0.5 * v : v;
        }
        out[k] = acc * h;
    }
    normalize(x, out);
    return out;
}

FringeTable analyze_fringes(std::span<const double> x, std::span<const double> d, double rel_floor) {
    FringeTable t;
    if (x.size() < 3) {
        return t;
    }
    double top = *std::max_element(d.begin(), d.end());
    struct Peak {
        size_t idx;
        double x, h;
    };
    std::vector<Peak> peaks;
    for (size_t i = 1; i + 1 < x.size(); i++) {
        if (d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] >= rel_floor * top) {
            double den = d[i - 1] - 2 * d[i] + d[i + 1];
            double off = den != 0 ? 0.5 * (d[i - 1] - d[i + 1]) / den : 0;
            double h = 0.5 * (x[i + 1] - x[i - 1]);
            peaks.push_back({i, x[i] + off * h, d[i] - 0.25 * (d[i - 1] - d[i + 1]) * off});
        }
    }
    if (peaks.empty()) {
        return t;
    }
    size_t main = 0;
    for (size_t k = 1; k < peaks.size(); k++) {
        if (peaks[k].h > peaks[main].h) {
            main = k;
        }
    }
    t.main_x = peaks[main].x;
    std::optional<size_t> second;
    if (main > 0) {
        second = main - 1;
    }
    if (main + 1 < peaks.size() && (!second || peaks[main + 1].h > peaks[*second].h)) {
        second = main + 1;
    }
    if (second) {
        t.has_second = true;
        t.second_x = peaks[*second].x;
        t.delta_x_f = std::abs(t.second_x - t.main_x);
        size_t lo = std::min(peaks[main].idx, peaks[*second].idx), hi = std::max(peaks[main].idx, peaks[*second].idx);
        double pmin = *std::min_element(d.begin() + lo, d.begin() + hi + 1);
        double ps = peaks[*second].h;
        t.visibility = (ps + pmin) > 0 ? (ps - pmin) / (ps + pmin) : 0;
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak &a, const Peak &b) { return a.h > b.h; });
    for (const auto &p : peaks) {
        t.peak_x.push_back(p.x);
        t.peak_height.push_back(p.h);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Metrics.

namespace {

std::vector<double> chi_with(
    const OrderSeries &beta,
    std::span<const double> phi,
    std::span<const double> tau,
    const std::function<double(double)> &phi_bar) {
    if (phi.size() != tau.size()) {
        throw Error(ErrorKind::DomainError, "chi needs aligned arrays");
    }
    std::vector<double> f(tau.size(), 0.0);
    for (const auto &[n, b] : beta) {
        if (b.size() != tau.size()) {
            throw Error(ErrorKind::DomainError, "chi needs aligned arrays");
        }
        for (size_t i = 0; i < tau.size(); i++) {
            f[i] += std::abs(b[i]) * std::abs(phi[i] - phi_bar(tau[i]));
        }
    }
    return cumulative_trapezoid(f, tau);
}

}  // namespace

std::vector<double> chi_metric(
    const OrderSeries &beta, std::span<const double> phi, double phi_bar, std::span<const double> tau) {
    return chi_with(beta, phi, tau, [&](double) { return phi_bar; });
}

std::vector<double> chi_metric(
    const OrderSeries &beta, std::span<const double> phi, const AngleSchedule &schedule, std::span<const double> tau) {
    return chi_with(beta, phi, tau, [&](double t) { return schedule.phi_bar_at(t); });
}

EpsilonSeries epsilon_metrics(std::span<const GaussianMoments> exact, std::span<const GaussianMoments> approx) {
    if (exact.size() != approx.size()) {
        throw Error(ErrorKind::ComparisonMismatch, "moment series have different lengths");
    }
    EpsilonSeries e;
    for (size_t i = 0; i < exact.size(); i++) {
        double a = exact[i].mean.norm(), b = approx[i].mean.norm();
        double d = (exact[i].mean - approx[i].mean).norm();
        e.eps1.push_back(a + b > 0 ? 2 * d / (a + b) : 0.0);
        double ca = exact[i].cov.hilbert_schmidt(), cb = approx[i].cov.hilbert_schmidt();
        double dc = (exact[i].cov - approx[i].cov).hilbert_schmidt();
        e.eps2.push_back(ca + cb > 0 ? 2 * dc / (ca + cb) : 0.0);
    }
    return e;
}

double density_l1(std::span<const double> x, std::span<const double> a, std::span<const double> b) {
    if (a.size() != x.size() || b.size() != x.size()) {
        throw Error(ErrorKind::ComparisonMismatch, "densities are not on the shared axis");
    }
    std::vector<double> pa(a.begin(), a.end()), pb(b.begin(), b.end());
    normalize(x, pa);
    normalize(x, pb);
    auto w = trapezoid_weights(x);
    double acc = 0;
    for (size_t i = 0; i < x.size(); i++) {
        acc += w[i] * std::abs(pa[i] - pb[i]);
    }
    return acc;
}

DeltaScan calibrate_delta(
    std::span<const double> x,
    std::span<const double> reference_density,
    std::span<const double> candidates,
    const std::function<std::vector<double>(double)> &analytic_density) {
    if (candidates.empty()) {
        throw Error(ErrorKind::DomainError, "no delta candidates");
    }
    DeltaScan scan;
    double best = INFINITY;
    for (double d : candidates) {
        double l1 = density_l1(x, analytic_density(d), reference_density);
        scan.deltas.push_back(d);
        scan.l1.push_back(l1);
        if (l1 < best) {
            best = l1;
            scan.best = d;
        }
    }
    return scan;
}

}  // namespace wigdyn
