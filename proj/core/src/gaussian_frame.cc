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

#include "wigdyn/gaussian_frame.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"

namespace wigdyn {

size_t FrameRecord::index_near(double t) const {
    auto it = std::lower_bound(tau.begin(), tau.end(), t);
    if (it == tau.end()) {
        return tau.size() - 1;
    }
    size_t k = it - tau.begin();
    if (k > 0 && std::abs(tau[k - 1] - t) <= std::abs(tau[k] - t)) {
        return k - 1;
    }
    return k;
}

std::vector<double> FrameRecord::kappa_from(int n, double t0) const {
    const auto &k = kappa.at(n);
    double base = interp_linear(tau, k, t0);
    std::vector<double> out(k.size());
    for (size_t i = 0; i < k.size(); i++) {
        out[i] = k[i] - base;
    }
    return out;
}

double FrameRecord::kappa_between(int n, double t0, double t1) const {
    const auto &k = kappa.at(n);
    return interp_linear(tau, k, t1) - interp_linear(tau, k, t0);
}

FrameRecord build_frames(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, const FrameOptions &options) {
    if (options.truncation_order < 2) {
        throw Error(ErrorKind::DomainError, "truncation order must be at least 2");
    }
    FlowOptions flow;
    flow.max_step = options.max_step;
    flow.max_angle_step = options.max_angle_step;
    flow.track_tangent = true;
    flow.checkpoints = options.checkpoints;
    std::sort(flow.checkpoints.begin(), flow.checkpoints.end());
    auto samples = integrate_flow(model, ratio, start, tau_end, flow);

    FrameRecord rec;
    rec.ratio = ratio;
    rec.trajectory = trajectory_from_samples(model, ratio, samples);
    rec.tau = rec.trajectory.tau;
    rec.centroid = rec.trajectory.points;
    rec.S.reserve(samples.size());
    for (const auto &s : samples) {
        rec.S.push_back(s.S);
        if (std::abs(s.S.det() - 1) > 1e-9) {
            std::ostringstream ss;
            ss << "det S drifted to " << s.S.det() << " at tau=" << s.tau;
            throw Error(ErrorKind::IntegrationAccuracy, ss.str());
        }
    }
    rec.alpha = spring_constant(model, rec.trajectory);
    auto ep = eta_phi(rec.S);
    rec.eta = std::move(ep.eta);
    rec.phi = std::move(ep.phi);
    std::vector<int> orders;
    for (int n = 3; n <= options.truncation_order; n++) {
        orders.push_back(n);
    }
    rec.beta = beta_coefficients(model, rec.centroid, rec.eta, ratio, orders);
    rec.kappa = kappa_integrals(rec.beta, rec.tau);
    return rec;
}

FlowSample frame_sample_at(const PotentialModel &model, const FrameRecord &frames, double tau, double max_step) {
    if (frames.size() == 0 || tau < frames.tau.front() || tau > frames.tau.back()) {
        throw Error(ErrorKind::DomainError, "time outside the frame record");
    }
    auto it = std::upper_bound(frames.tau.begin(), frames.tau.end(), tau);
    size_t k = (size_t)(it - frames.tau.begin()) - 1;
    double h = tau - frames.tau[k];
    if (h <= 1e-14 * std::max(1.0, std::abs(tau))) {
        return {frames.tau[k], frames.centroid[k], frames.S[k]};
    }
    FlowOptions flow;
    flow.max_step = max_step;
    flow.track_tangent = true;
    auto local = integrate_flow(model, frames.ratio, frames.centroid[k], h, flow);
    return {tau, local.back().point, local.back().S * frames.S[k]};
}

std::vector<double> spring_constant(const PotentialModel &model, const ClassicalTrajectory &trajectory) {
    std::vector<double> out;
    out.reserve(trajectory.points.size());
    for (const auto &p : trajectory.points) {
        out.push_back(model.eval_derivative(2, p.x));
    }
    return out;
}

namespace {

// Cubic interpolation of samples around interval [i, i+1].
double local_cubic(std::span<const double> f, std::span<const double> t, size_t i, double x) {
    size_t n = t.size();
    size_t lo = (i == 0) ? 0 : i - 1;
    size_t hi = std::min(lo + 3, n - 1);
    lo = (hi >= 3) ? hi - 3 : 0;
    double acc = 0;
    for (size_t a = lo; a <= hi; a++) {
        double w = 1;
        for (size_t b = lo; b <= hi; b++) {
            if (a != b) {
                w *= (x - t[b]) / (t[a] - t[b]);
            }
        }
        acc += w * f[a];
    }
    return acc;
}

Mat2 exp_traceless(const Mat2 &m) {
    double q2 = -m.det();
    double c, s;
    if (q2 > 0) {
        double q = std::sqrt(q2);
        c = std::cosh(q);
        s = (q < 1e-8) ? 1 + q2 / 6 : std::sinh(q) / q;
    } else {
        double q = std::sqrt(-q2);
        c = std::cos(q);
        s = (q < 1e-8) ? 1 + q2 / 6 : std::sin(q) / q;
    }
    return Mat2::identity() * c + m * s;
}

}  // namespace

std::vector<Symplectic2> propagate_S(std::span<const double> alpha, FreqRatio ratio, std::span<const double> tau) {
    if (alpha.size() != tau.size() || tau.empty()) {
        throw Error(ErrorKind::DomainError, "propagate_S needs aligned, nonempty arrays");
    }
    const double r = ratio.r();
    const double g = std::sqrt(3.0) / 6;
    std::vector<Symplectic2> out;
    out.reserve(tau.size());
    Symplectic2 S = Symplectic2::identity();
    out.push_back(S);
    for (size_t i = 0; i + 1 < tau.size(); i++) {
        double h = tau[i + 1] - tau[i];
        double t1 = tau[i] + (0.5 - g) * h, t2 = tau[i] + (0.5 + g) * h;
        double a1, a2;
        if (tau.size() < 4) {
            a1 = alpha[i] + (alpha[i + 1] - alpha[i]) * (0.5 - g);
            a2 = alpha[i] + (alpha[i + 1] - alpha[i]) * (0.5 + g);
        } else {
            a1 = local_cubic(alpha, tau, i, t1);
            a2 = local_cubic(alpha, tau, i, t2);
        }
        // Omega = h/2 (A1 + A2) + sqrt(3) h^2 / 12 [A2, A1]; the commutator of
        // two generators of this shape is diag(a2 - a1, a1 - a2).
        Mat2 omega{0, h * r, -0.5 * h * (a1 + a2) / r, 0};
        double comm = std::sqrt(3.0) * h * h / 12 * (a2 - a1);
        omega.xx += comm;
        omega.pp -= comm;
        S = exp_traceless(omega) * S;
        if (std::abs(S.det() - 1) > 1e-9) {
            std::ostringstream ss;
            ss << "det S drifted to " << S.det() << " at tau=" << tau[i + 1];
            throw Error(ErrorKind::IntegrationAccuracy, ss.str());
        }
        out.push_back(S);
    }
    return out;
}

EtaPhi eta_phi(std::span<const Symplectic2> S) {
    EtaPhi out;
    out.eta.reserve(S.size());
    out.phi.reserve(S.size());
    double prev = 0;
    for (size_t i = 0; i < S.size(); i++) {
        out.eta.push_back(std::max(std::hypot(S[i].xx, S[i].xp), 1e-12));
        double raw = std::atan2(S[i].xp, S[i].xx);
        if (i == 0) {
            out.phi.push_back(raw);
        } else {
            double step = std::remainder(raw - prev, 2 * std::numbers::pi);
            if (std::abs(step) >= std::numbers::pi / 2) {
                std::ostringstream ss;
                ss << "angle advanced by " << step << " rad in one sample; refine the step";
                throw Error(ErrorKind::IntegrationAccuracy, ss.str());
            }
            out.phi.push_back(out.phi.back() + step);
        }
        prev = raw;
    }
    return out;
}

OrderSeries beta_coefficients(
    const PotentialModel &model,
    std::span<const PhasePoint> centroid,
    std::span<const double> eta,
    FreqRatio ratio,
    const std::vector<int> &orders) {
    OrderSeries out;
    for (int n : orders) {
        if (n < 3) {
            throw Error(ErrorKind::DomainError, "nonlinearity orders start at 3");
        }
        double fact = std::tgamma((double)n);  // (n-1)!
        auto &b = out[n];
        b.reserve(centroid.size());
        for (size_t i = 0; i < centroid.size(); i++) {
            b.push_back(ratio.inv() / fact * model.eval_derivative(n, centroid[i].x) * std::pow(eta[i], n));
        }
    }
    return out;
}

OrderSeries kappa_integrals(const OrderSeries &beta, std::span<const double> tau) {
    OrderSeries out;
    for (const auto &[n, b] : beta) {
        auto trap = cumulative_trapezoid(b, tau);
        auto simp = cumulative_simpson(b, tau);
        double scale = 0, gap = 0;
        for (size_t i = 0; i < trap.size(); i++) {
            scale = std::max(scale, std::abs(simp[i]));
            gap = std::max(gap, std::abs(trap[i] - simp[i]));
        }
        if (gap > 1e-6 * scale && gap > 1e-300) {
            std::ostringstream ss;
            ss << "kappa_" << n << " trapezoid and third-order rules differ by " << gap / scale
               << " relative; sample beta more densely";
            throw Error(ErrorKind::QuadratureAccuracy, ss.str());
        }
        out[n] = std::move(simp);
    }
    return out;
}

std::vector<GaussianMoments> thawed_gaussian_state(const GaussianMoments &initial, const FrameRecord &frames) {
    std::vector<GaussianMoments> out;
    out.reserve(frames.size());
    PhasePoint offset = initial.mean - frames.centroid.front();
    for (size_t i = 0; i < frames.size(); i++) {
        out.push_back({frames.centroid[i] + frames.S[i] * offset, congruence(frames.S[i], initial.cov)});
    }
    return out;
}

}  // namespace wigdyn
