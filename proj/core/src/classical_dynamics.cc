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

#include "wigdyn/classical_dynamics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"
#include "wigdyn/special_functions.h"

namespace wigdyn {

double classical_energy(const PotentialModel &model, FreqRatio ratio, PhasePoint point) {
    return 0.5 * ratio.r() * point.p * point.p + model.value(point.x) * ratio.inv();
}

namespace {

// Yoshida's fourth-order composition of the leapfrog.
struct YoshidaCoefficients {
    double c[4];
    double d[3];
    YoshidaCoefficients() {
        double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        double w0 = -std::cbrt(2.0) * w1;
        c[0] = c[3] = w1 / 2;
        c[1] = c[2] = (w0 + w1) / 2;
        d[0] = d[2] = w1;
        d[1] = w0;
    }
};
const YoshidaCoefficients kYoshida;

void yoshida_step(const PotentialModel &model, double r, double h, bool tangent, PhasePoint &q, Symplectic2 &S) {
    for (int stage = 0; stage < 4; stage++) {
        double hd = kYoshida.c[stage] * h;
        q.x += r * q.p * hd;
        if (tangent) {
            S.xx += r * hd * S.px;
            S.xp += r * hd * S.pp;
        }
        if (stage == 3) {
            break;
        }
        double hk = kYoshida.d[stage] * h / r;
        q.p -= model.eval_derivative(1, q.x) * hk;
        if (tangent) {
            double a = model.eval_derivative(2, q.x) * hk;
            S.px -= a * S.xx;
            S.pp -= a * S.xp;
        }
    }
}

}  // namespace

std::vector<FlowSample> integrate_flow(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, const FlowOptions &options) {
    if (!(options.max_step > 0) || !(tau_end > 0)) {
        throw Error(ErrorKind::DomainError, "integration needs a positive step and end time");
    }
    const double r = ratio.r();
    std::vector<FlowSample> out;
    PhasePoint q = start;
    Symplectic2 S = Symplectic2::identity();
    out.push_back({0.0, q, S});

    if (options.max_angle_step <= 0 && options.checkpoints.empty()) {
        // Uniform grid that lands exactly on tau_end.
        size_t n = (size_t)std::ceil(tau_end / options.max_step - 1e-9);
        double h = tau_end / (double)n;
        out.reserve(n + 1);
        for (size_t k = 1; k <= n; k++) {
            yoshida_step(model, r, h, options.track_tangent, q, S);
            out.push_back({tau_end * (double)k / (double)n, q, S});
        }
        return out;
    }

    double tau = 0;
    size_t next_check = 0;
    while (tau < tau_end) {
        double eta2 = S.xx * S.xx + S.xp * S.xp;
        double h = options.max_step;
        if (options.max_angle_step > 0) {
            h = std::min(h, options.max_angle_step * eta2 / r);
        }
        while (next_check < options.checkpoints.size() && options.checkpoints[next_check] <= tau) {
            next_check++;
        }
        double stop = tau_end;
        if (next_check < options.checkpoints.size()) {
            stop = std::min(stop, options.checkpoints[next_check]);
        }
        double remaining = stop - tau;
        if (h >= remaining) {
            h = remaining;
        } else if (h > 0.5 * remaining) {
            // Avoid a sliver of a final step.
            h = 0.5 * remaining;
        }
        yoshida_step(model, r, h, options.track_tangent || options.max_angle_step > 0, q, S);
        tau = (h == remaining) ? stop : tau + h;
        out.push_back({tau, q, S});
    }
    return out;
}

ClassicalTrajectory trajectory_from_samples(
    const PotentialModel &model, FreqRatio ratio, std::span<const FlowSample> samples) {
    const double r = ratio.r();
    ClassicalTrajectory traj;
    traj.tau.reserve(samples.size());
    traj.points.reserve(samples.size());
    for (const auto &s : samples) {
        traj.tau.push_back(s.tau);
        traj.points.push_back(s.point);
    }
    traj.energy = classical_energy(model, ratio, samples.front().point);
    double scale = std::abs(traj.energy);
    if (scale == 0) {
        scale = 0.5 * r * samples.front().point.p * samples.front().point.p +
                std::abs(model.value(samples.front().point.x)) / r;
    }
    if (scale == 0) {
        scale = 1;
    }
    for (const auto &s : samples) {
        double e = classical_energy(model, ratio, s.point);
        traj.energy_drift = std::max(traj.energy_drift, std::abs(e - traj.energy) / scale);
    }

    for (size_t k = 1; k < samples.size(); k++) {
        const auto &a = samples[k - 1];
        const auto &b = samples[k];
        double pa = a.point.p, pb = b.point.p;
        if ((pa > 0 && pb <= 0) || (pa < 0 && pb >= 0)) {
            if (pb == 0 && k + 1 < samples.size() && samples[k + 1].point.p * pa > 0) {
                continue;  // Touches zero without crossing.
            }
            double da = -model.eval_derivative(1, a.point.x) / r;
            double db = -model.eval_derivative(1, b.point.x) / r;
            traj.turning_points.push_back(hermite_root(a.tau, pa, da, b.tau, pb, db));
        }
        if (!traj.tau_three) {
            double fa = model.eval_derivative(2, a.point.x);
            double fb = model.eval_derivative(2, b.point.x);
            if ((fa < 0) != (fb < 0)) {
                double dfa = model.eval_derivative(3, a.point.x) * r * a.point.p;
                double dfb = model.eval_derivative(3, b.point.x) * r * b.point.p;
                traj.tau_three = hermite_root(a.tau, fa, dfa, b.tau, fb, dfb);
            }
        }
    }
    // Drop duplicates produced by a sample sitting exactly on zero.
    traj.turning_points.erase(
        std::unique(
            traj.turning_points.begin(),
            traj.turning_points.end(),
            [](double u, double v) {
                return std::abs(u - v) < 1e-12;
            }),
        traj.turning_points.end());
    if (samples.front().point.p == 0 && !traj.turning_points.empty() && traj.turning_points.front() == 0) {
        traj.turning_points.erase(traj.turning_points.begin());
    }
    if (!traj.turning_points.empty()) {
        traj.tau_max = traj.turning_points.front();
    }
    return traj;
}

ClassicalTrajectory integrate_classical(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, double tau_end, double dtau) {
    if (!(dtau > 0) || !(tau_end > 0)) {
        throw Error(ErrorKind::DomainError, "integrate_classical needs dtau > 0 and tau_end > 0");
    }
    FlowOptions opt;
    opt.max_step = dtau;
    auto samples = integrate_flow(model, ratio, start, tau_end, opt);
    auto traj = trajectory_from_samples(model, ratio, samples);
    if (traj.energy_drift > 1e-6) {
        std::ostringstream ss;
        ss << "relative energy drift " << traj.energy_drift << " with step " << dtau;
        throw Error(ErrorKind::IntegrationAccuracy, ss.str());
    }
    return traj;
}

DoubleWellTimescales double_well_timescales(double d, double x_s) {
    if (!(d > 0) || !(x_s > 0) || x_s > std::sqrt(2.0) * d) {
        throw Error(ErrorKind::DomainError, "double_well_timescales needs 0 < x_s <= sqrt(2) d");
    }
    DoubleWellTimescales t;
    t.tau_max = std::log(4 * std::sqrt(2.0) * d / x_s);
    t.x_turn = std::sqrt(std::max(0.0, 2 * d * d - x_s * x_s));
    return t;
}

namespace {

struct EllipticSetup {
    double hi, m, lambda, u0, sign;
};

EllipticSetup elliptic_setup(double d, double x_s) {
    double a = std::abs(x_s);
    if (!(a > 0) || !(a < std::sqrt(2.0) * d)) {
        throw Error(ErrorKind::NotApplicable, "elliptic solution needs 0 < |x_s| < sqrt(2) d");
    }
    double b = std::sqrt(2 * d * d - a * a);
    EllipticSetup e;
    e.hi = std::max(a, b);
    double lo = std::min(a, b);
    e.m = 1 - (lo * lo) / (e.hi * e.hi);
    e.lambda = e.hi / (std::sqrt(2.0) * d);
    e.u0 = (a < b) ? elliptic_k(e.m) : 0.0;
    e.sign = x_s < 0 ? -1.0 : 1.0;
    return e;
}

}  // namespace

double double_well_exact_tau_max(double d, double x_s) {
    auto e = elliptic_setup(d, x_s);
    return elliptic_k(e.m) / e.lambda;
}

std::vector<PhasePoint> elliptic_cross_check(
    const PotentialModel &model, FreqRatio ratio, PhasePoint start, std::span<const double> tau) {
    if (model.kind() != PotentialModel::Kind::DoubleWell) {
        throw Error(ErrorKind::NotApplicable, "elliptic solution exists only for the quartic double well");
    }
    if (start.p != 0) {
        throw Error(ErrorKind::NotApplicable, "elliptic solution implemented for a start at rest");
    }
    auto e = elliptic_setup(model.d(), start.x);
    std::vector<PhasePoint> out;
    out.reserve(tau.size());
    for (double t : tau) {
        auto j = jacobi_elliptic(e.lambda * t + e.u0, e.m);
        double x = e.hi * j.dn;
        double dx = -e.hi * e.m * e.lambda * j.sn * j.cn;
        out.push_back({e.sign * x, e.sign * dx / ratio.r()});
    }
    return out;
}

}  // namespace wigdyn
