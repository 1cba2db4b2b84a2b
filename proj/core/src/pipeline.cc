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

#include "wigdyn/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wigdyn/classical_dynamics.h"
#include "wigdyn/decoherence.h"
#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"

namespace wigdyn {

ScenarioContext make_context(const ScenarioConfig &config) {
    validate_config(config);
    ScenarioContext ctx{config, config.potential.build(), config.ratio(), {}, 0, config_hash(config)};
    ctx.initial = GaussianMoments::thermal(config.n_bar, {config.x_s, 0});
    if (config.tau_end > 0) {
        ctx.tau_end = config.tau_end;
    } else {
        ctx.tau_end = 2 * double_well_exact_tau_max(config.potential.d, config.x_s);
    }
    return ctx;
}

std::vector<double> default_snapshots(const FrameRun &run, double tau_end) {
    std::vector<double> out{0};
    auto add = [&](std::optional<double> t) {
        if (t && *t >= 0 && *t <= tau_end * (1 + 1e-12)) {
            out.push_back(std::min(*t, tau_end));
        }
    };
    add(run.tau_three);
    add(run.tau_d);
    add(run.tau_max);
    if (run.tau_max && run.tau_d) {
        add(2 * *run.tau_max - *run.tau_d);
    }
    if (run.tau_max) {
        add(2 * *run.tau_max);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

FrameRun run_frames(const ScenarioContext &ctx) {
    const ScenarioConfig &cfg = ctx.config;
    FrameOptions opt;
    opt.max_step = cfg.dtau;
    opt.truncation_order = cfg.potential.truncation_order;
    opt.checkpoints = cfg.snapshots;
    std::erase_if(opt.checkpoints, [&](double t) { return t <= 0 || t >= ctx.tau_end; });

    FrameRun run;
    run.frames = build_frames(ctx.model, ctx.ratio, ctx.initial.mean, ctx.tau_end, opt);
    const FrameRecord &f = run.frames;

    run.gamma_eff = gamma_fluc(ctx.model, f.centroid, ctx.ratio, cfg.decoherence.s1, cfg.decoherence.s2);
    for (double &g : run.gamma_eff) {
        g += cfg.decoherence.gamma_loc;
    }
    run.sigma_sq = blurring(f.eta, run.gamma_eff, f.tau, ctx.ratio);

    run.tau_three = f.trajectory.tau_three;
    run.tau_max = f.trajectory.tau_max;
    if (cfg.schedule.automatic) {
        run.schedule = auto_schedule(f, ctx.tau_end, cfg.schedule.delta, &run.first);
    } else {
        run.schedule.segments = cfg.schedule.segments;
        run.schedule.delta = cfg.schedule.delta;
        const auto &s0 = run.schedule.segments.front();
        run.first = choose_angle(f, s0.tau_start, s0.tau_end);
        run.first.phi_bar = s0.phi_bar;
    }
    run.schedule.validate(ctx.tau_end);
    if (!run.first.fallback) {
        run.tau_d = run.first.tau_star;
    }

    double worst = 0, worst_tau = 0;
    for (size_t i = 0; i < f.size(); i++) {
        double ratio = f.eta[i] / std::max(std::abs(f.centroid[i].x), 1e-300);
        if (ratio > worst) {
            worst = ratio;
            worst_tau = f.tau[i];
        }
    }
    if (worst > 0.3) {
        std::ostringstream ss;
        ss << "small-fluctuation condition violated: eta/|x_c| reaches " << worst << " at tau=" << worst_tau;
        run.warnings.push_back(ss.str());
    }

    size_t n = std::max<size_t>(1, (size_t)std::llround(ctx.tau_end / cfg.grids.moment_dtau));
    run.moment_times = linspace(0, ctx.tau_end, n + 1);
    run.moment_times.back() = ctx.tau_end;

    if (cfg.snapshots.empty()) {
        run.snapshot_times = default_snapshots(run, ctx.tau_end);
    } else {
        run.snapshot_times = cfg.snapshots;
        for (double t : run.snapshot_times) {
            if (t > ctx.tau_end) {
                throw Error(ErrorKind::ConfigError, "/snapshots: time beyond tau_end");
            }
        }
        std::sort(run.snapshot_times.begin(), run.snapshot_times.end());
    }
    return run;
}

namespace {

GaussianMoments approx_moments_at(const ScenarioContext &ctx, const FrameRun &run, double tau) {
    double t[1] = {tau};
    return schedule_moments(run.frames, run.schedule, run.sigma_sq, ctx.initial, t).front();
}

double kappa_or_zero(const FrameRecord &f, int n, double t0, double t1) {
    return f.kappa.count(n) ? f.kappa_between(n, t0, t1) : 0.0;
}

double sigma_between(const FrameRun &run, double t0, double t1) {
    return interp_linear(run.frames.tau, run.sigma_sq, t1) - interp_linear(run.frames.tau, run.sigma_sq, t0);
}

}  // namespace

GridWindow snapshot_window(const ScenarioContext &ctx, const FrameRun &run, double tau) {
    GaussianMoments m = approx_moments_at(ctx, run, tau);
    FlowSample fs = frame_sample_at(ctx.model, run.frames, tau);
    double eta = std::hypot(fs.S.xx, fs.S.xp);
    GridWindow w = auto_window(eta, m.mean - fs.point, m.cov, ctx.config.grids.wigner_nx, ctx.config.grids.wigner_np);
    // The oracle holds no mass beyond its grid, so the window is clipped to
    // it; both solvers then share the clipped window.
    if (ctx.config.grids.reference.n > 0 || ctx.config.potential.kind == "double_well") {
        SpatialGrid g = reference_grid(ctx);
        // Half a cell inside the ends absorbs rounding of the shift.
        w.x_min = std::max(w.x_min, g.x_min + 0.5 * g.dx - fs.point.x);
        w.x_max = std::min(w.x_max, g.x_max() - 0.5 * g.dx - fs.point.x);
    }
    if (ctx.config.grids.wigner_frame == FrameTag::Lab) {
        w.x_min += fs.point.x;
        w.x_max += fs.point.x;
        w.p_min += fs.point.p;
        w.p_max += fs.point.p;
    }
    return w;
}

SpatialGrid reference_grid(const ScenarioContext &ctx) {
    const auto &g = ctx.config.grids.reference;
    if (g.n > 0) {
        return SpatialGrid::span(g.x_min, g.x_max, g.n);
    }
    if (ctx.config.potential.kind != "double_well") {
        throw Error(ErrorKind::ConfigError, "/grids/reference/n: required for this potential");
    }
    return suggest_double_well_grid(ctx.config.potential.d, ctx.config.x_s, ctx.ratio, ctx.config.n_bar);
}

size_t estimated_reference_points(const ScenarioContext &ctx) {
    return reference_grid(ctx).n;
}

std::vector<double> marginal_axis(const ScenarioContext &ctx, const FrameRun &run, double tau) {
    GaussianMoments m = approx_moments_at(ctx, run, tau);
    double hw = ctx.config.grids.marginal_half_width;
    if (!(hw > 0)) {
        hw = std::max(12 * std::sqrt(std::max(m.cov.xx, 0.0)), 60.0);
    }
    const size_t cap = ctx.config.grids.marginal_points;
    bool has_grid = ctx.config.grids.reference.n > 0 || ctx.config.potential.kind == "double_well";
    if (!has_grid) {
        return linspace(m.mean.x - hw, m.mean.x + hw, cap);
    }
    SpatialGrid g = reference_grid(ctx);
    long lo = (long)std::ceil((m.mean.x - hw - g.x_min) / g.dx);
    long hi = (long)std::floor((m.mean.x + hw - g.x_min) / g.dx);
    lo = std::max(lo, 0L);
    hi = std::min(hi, (long)g.n - 1);
    size_t count = hi >= lo ? (size_t)(hi - lo + 1) : 0;
    size_t stride = std::max<size_t>(1, (count + cap - 1) / cap);
    std::vector<double> out;
    for (long i = lo; i <= hi; i += (long)stride) {
        out.push_back(g.x((size_t)i));
    }
    return out;
}

namespace {

AngleSchedule schedule_with(const FrameRun &run, std::optional<double> delta) {
    AngleSchedule s = run.schedule;
    if (delta && s.segments.size() >= 2) {
        s.segments[1].phi_bar += *delta - s.delta;
        s.delta = *delta;
    }
    return s;
}

CubicPhaseParams first_params(const ScenarioContext &ctx, const FrameRun &run, double t1) {
    return {
        kappa_or_zero(run.frames, 3, 0, t1),
        kappa_or_zero(run.frames, 4, 0, t1),
        sigma_between(run, 0, t1),
        ctx.config.n_bar,
    };
}

// Builds the analytic state; also reports the segment it belongs to.
std::unique_ptr<GaussianFrameState> build_state(
    const ScenarioContext &ctx, const FrameRun &run, double tau, std::optional<double> delta, size_t *segment) {
    AngleSchedule s = schedule_with(run, delta);
    size_t k = s.segment_index(tau);
    if (segment) {
        *segment = k;
    }
    const auto &s0 = s.segments[0];
    if (k == 0) {
        return std::make_unique<SegmentOneState>(s0.phi_bar, first_params(ctx, run, tau));
    }
    if (k > 1) {
        throw Error(ErrorKind::NotApplicable, "analytic states cover at most two angle segments");
    }
    SegmentOneState first(s0.phi_bar, first_params(ctx, run, s0.tau_end));
    const auto &s1 = s.segments[1];
    SegmentTwoParams second;
    second.phi_bar = s1.phi_bar;
    for (const auto &[n, series] : run.frames.kappa) {
        second.kappa[n] = run.frames.kappa_between(n, s1.tau_start, tau);
    }
    second.sigma_sq = sigma_between(run, s1.tau_start, tau);
    ComposeOptions opt;
    opt.nx = ctx.config.grids.compose_nx;
    opt.np = ctx.config.grids.compose_np;
    return std::make_unique<ComposedState>(compose_segments(first, second, opt));
}

std::vector<double> marginal_of(
    const ScenarioContext &ctx,
    const FrameRun &run,
    double tau,
    std::span<const double> x,
    const GaussianFrameState &state,
    size_t segment,
    std::optional<double> delta) {
    FlowSample fs = frame_sample_at(ctx.model, run.frames, tau);
    if (segment == 1) {
        return position_marginal_composed(dynamic_cast<const ComposedState &>(state), fs.S, fs.point, x);
    }
    AngleSchedule s = schedule_with(run, delta);
    double phi1 = s.segments[0].phi_bar;
    CubicPhaseParams q = first_params(ctx, run, tau);
    if (ctx.config.n_bar == 0) {
        // kappa4 only shifts the density at second order; the pure-state
        // closed form keeps kappa3.
        auto d = position_marginal_coherent(x, fs.S, phi1, q.kappa3, fs.point);
        if (q.sigma_sq > 0) {
            PhasePoint dir = blurring_direction(fs.S, phi1);
            d = position_marginal_decohered(x, d, q.sigma_sq * dir.x * dir.x);
        }
        return d;
    }
    // Thermal states: integrate the lab Wigner function over p.
    GaussianMoments m = approx_moments_at(ctx, run, tau);
    double hp = 12 * std::sqrt(std::max(m.cov.pp, 1.0));
    GridWindow w{x.front(), x.back(), x.size(), m.mean.p - hp, m.mean.p + hp, 1024};
    return to_lab_frame(state, fs.S, fs.point, w, FrameTag::Lab, tau).x_marginal();
}

}  // namespace

std::unique_ptr<GaussianFrameState> analytic_state(
    const ScenarioContext &ctx, const FrameRun &run, double tau, std::optional<double> delta) {
    return build_state(ctx, run, tau, delta, nullptr);
}

std::vector<double> analytic_marginal(
    const ScenarioContext &ctx,
    const FrameRun &run,
    double tau,
    std::span<const double> x,
    std::optional<double> delta) {
    size_t seg = 0;
    auto state = build_state(ctx, run, tau, delta, &seg);
    return marginal_of(ctx, run, tau, x, *state, seg, delta);
}

AnalyticRun run_analytic(const ScenarioContext &ctx, const FrameRun &run, bool with_wigner) {
    AnalyticRun out;
    out.moments = schedule_moments(run.frames, run.schedule, run.sigma_sq, ctx.initial, run.moment_times);
    for (double tau : run.snapshot_times) {
        Snapshot snap;
        snap.tau = tau;
        snap.x = marginal_axis(ctx, run, tau);
        try {
            size_t seg = 0;
            auto state = build_state(ctx, run, tau, std::nullopt, &seg);
            snap.density = marginal_of(ctx, run, tau, snap.x, *state, seg, std::nullopt);
            if (with_wigner) {
                FlowSample fs = frame_sample_at(ctx.model, run.frames, tau);
                snap.wigner = to_lab_frame(
                    *state, fs.S, fs.point, snapshot_window(ctx, run, tau), ctx.config.grids.wigner_frame, tau);
            }
        } catch (const Error &e) {
            std::ostringstream ss;
            ss << "snapshot at tau=" << tau << " skipped: " << e.what();
            snap.note = ss.str();
            out.warnings.push_back(snap.note);
        }
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

ReferenceRun run_reference(const ScenarioContext &ctx, const FrameRun &run, bool allow_large, bool with_wigner) {
    const ScenarioConfig &cfg = ctx.config;
    ReferenceRun out;
    out.grid = reference_grid(ctx);
    if (out.grid.n > (size_t(1) << 21) && !allow_large) {
        std::ostringstream ss;
        ss << "/grids/reference: the oracle needs " << out.grid.n
           << " grid points (above 2^21); pass --allow-large to run it anyway";
        throw Error(ErrorKind::ConfigError, ss.str());
    }
    EvolveOptions ev;
    ev.dtau = cfg.grids.reference.dtau;
    ev.moment_times = run.moment_times;
    ev.state_times = run.snapshot_times;

    std::vector<std::vector<double>> density;
    std::vector<WaveFunction> states;
    bool pure = !cfg.decoherence.any() && cfg.n_bar == 0;
    if (pure) {
        auto res = split_operator_evolve(ctx.model, ctx.ratio, coherent_state(out.grid, ctx.initial.mean), ev);
        EnsembleResult &e = out.ensemble;
        e.n_traj = 1;
        e.moment_times = res.moment_times;
        for (const auto &m : res.moments) {
            e.mean_moments.push_back(m.central());
            e.stderr_moments.push_back({{0, 0}, Mat2::zero()});
        }
        e.state_times = res.state_times;
        for (const auto &s : res.states) {
            std::vector<double> d(s.psi.size());
            for (size_t i = 0; i < d.size(); i++) {
                d[i] = std::norm(s.psi[i]);
            }
            e.mean_density.push_back(std::move(d));
        }
        states = std::move(res.states);
    } else {
        EnsembleConfig ec;
        ec.model = &ctx.model;
        ec.ratio = ctx.ratio;
        ec.grid = out.grid;
        ec.start = ctx.initial.mean;
        ec.n_bar = cfg.n_bar;
        ec.evolve = ev;
        ec.noise = cfg.decoherence;
        ec.n_traj = cfg.grids.reference.n_traj;
        ec.seed = cfg.seed;
        ec.threads = cfg.grids.reference.threads;
        out.ensemble = ensemble_average(ec);
    }

    const auto &e = out.ensemble;
    for (size_t k = 0; k < e.state_times.size(); k++) {
        double tau = e.state_times[k];
        Snapshot snap;
        snap.tau = tau;
        snap.x = marginal_axis(ctx, run, tau);
        for (double x : snap.x) {
            size_t i = (size_t)std::llround((x - out.grid.x_min) / out.grid.dx);
            snap.density.push_back(e.mean_density[k][i]);
        }
        if (with_wigner && !states.empty()) {
            FlowSample fs = frame_sample_at(ctx.model, run.frames, tau);
            FrameTag tag = cfg.grids.wigner_frame;
            PhasePoint origin = tag == FrameTag::Lab ? PhasePoint{0, 0} : fs.point;
            try {
                snap.wigner = wigner_transform(states[k], snapshot_window(ctx, run, tau), origin, tag);
                snap.wigner->tau = tau;
            } catch (const Error &err) {
                snap.note = err.what();
            }
        } else if (with_wigner) {
            snap.note = "mixed-state ensemble: no Wigner grid";
        }
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison.

std::vector<double> chi_on(const FrameRun &run, std::span<const double> taus) {
    auto chi = chi_metric(run.frames.beta, run.frames.phi, run.schedule, run.frames.tau);
    std::vector<double> out;
    for (double t : taus) {
        out.push_back(interp_linear(run.frames.tau, chi, t));
    }
    return out;
}

namespace {

std::vector<double> resample(std::span<const double> xs, std::span<const double> f, std::span<const double> x) {
    std::vector<double> out;
    for (double v : x) {
        out.push_back(v < xs.front() || v > xs.back() ? 0.0 : interp_linear(xs, f, v));
    }
    return out;
}

}  // namespace

ComparisonReport compare_runs(
    const MomentSeries &analytic,
    const MomentSeries &reference,
    const MarginalSet *am,
    const MarginalSet *rm,
    std::optional<double> tau_max,
    const ComparisonThresholds &th) {
    if (analytic.hash != reference.hash) {
        throw Error(
            ErrorKind::ComparisonMismatch,
            "config hashes differ: " + analytic.hash + " vs " + reference.hash);
    }
    if (analytic.tau.size() != reference.tau.size()) {
        throw Error(ErrorKind::ComparisonMismatch, "moment time grids differ in length");
    }
    for (size_t i = 0; i < analytic.tau.size(); i++) {
        if (std::abs(analytic.tau[i] - reference.tau[i]) > 1e-9 * std::max(1.0, std::abs(analytic.tau[i]))) {
            throw Error(ErrorKind::ComparisonMismatch, "moment time grids differ");
        }
    }
    ComparisonReport rep;
    rep.hash = analytic.hash;
    rep.tau = analytic.tau;
    rep.tau_max = tau_max;
    auto eps = epsilon_metrics(reference.moments, analytic.moments);
    rep.eps1 = eps.eps1;
    rep.eps2 = eps.eps2;
    for (size_t i = 0; i < rep.tau.size(); i++) {
        rep.max_eps1 = std::max(rep.max_eps1, rep.eps1[i]);
        bool excluded = tau_max && std::abs(rep.tau[i] - *tau_max) < th.eps2_exclusion;
        if (!excluded) {
            rep.max_eps2_checked = std::max(rep.max_eps2_checked, rep.eps2[i]);
        }
    }
    rep.eps1_pass = rep.max_eps1 < th.eps1;
    rep.eps2_pass = rep.max_eps2_checked < th.eps2;

    if (am && rm) {
        if (am->hash != analytic.hash || rm->hash != analytic.hash) {
            throw Error(ErrorKind::ComparisonMismatch, "marginal artifacts carry a different config hash");
        }
        double best_gap = INFINITY;
        size_t best = 0;
        for (size_t k = 0; k < am->tau.size(); k++) {
            auto it = std::find_if(rm->tau.begin(), rm->tau.end(), [&](double t) {
                return std::abs(t - am->tau[k]) <= 1e-9 * std::max(1.0, t);
            });
            if (it == rm->tau.end() || am->density[k].empty() || rm->density[it - rm->tau.begin()].empty()) {
                continue;
            }
            size_t j = (size_t)(it - rm->tau.begin());
            const auto &x = am->x[k];
            std::vector<double> ref = (rm->x[j] == x) ? rm->density[j] : resample(rm->x[j], rm->density[j], x);
            rep.snapshot_tau.push_back(am->tau[k]);
            rep.marginal_l1.push_back(density_l1(x, am->density[k], ref));
            rep.fringes_analytic.push_back(analyze_fringes(x, am->density[k]));
            rep.fringes_reference.push_back(analyze_fringes(x, ref));
            if (tau_max && std::abs(am->tau[k] - *tau_max) < best_gap) {
                best_gap = std::abs(am->tau[k] - *tau_max);
                best = rep.marginal_l1.size() - 1;
            }
        }
        if (tau_max && best_gap < 1e-6 * std::max(1.0, *tau_max)) {
            rep.marginal_pass = rep.marginal_l1[best] < th.marginal_l1;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Artifacts.

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::ConfigError, "cannot write " + path);
    }
    return out;
}

void write_hash_line(std::ofstream &out, const char *kind, const std::string &hash) {
    out << "# wigdyn " << kind << " config_hash=" << hash << "\n";
}

struct CsvTable {
    std::string hash;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

CsvTable read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ComparisonMismatch, "cannot read " + path);
    }
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# wigdyn", 0) != 0) {
        throw Error(ErrorKind::ComparisonMismatch, path + ": missing artifact header");
    }
    auto pos = line.find("config_hash=");
    if (pos == std::string::npos) {
        throw Error(ErrorKind::ComparisonMismatch, path + ": missing config hash");
    }
    t.hash = line.substr(pos + 12);
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::ComparisonMismatch, path + ": missing column header");
    }
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        for (const auto &cell : split(line)) {
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (row.size() != t.header.size()) {
            throw Error(ErrorKind::ComparisonMismatch, path + ": ragged row");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

void write_moments_csv(const std::string &path, const MomentSeries &s) {
    auto out = open_out(path);
    write_hash_line(out, "moments", s.hash);
    bool se = !s.stderr_moments.empty();
    out << "tau,mean_x,mean_p,cxx,cxp,cpp";
    if (se) {
        out << ",se_mean_x,se_mean_p,se_cxx,se_cxp,se_cpp";
    }
    out << "\n";
    for (size_t i = 0; i < s.tau.size(); i++) {
        const auto &m = s.moments[i];
        out << fmt(s.tau[i]) << ',' << fmt(m.mean.x) << ',' << fmt(m.mean.p) << ',' << fmt(m.cov.xx) << ','
            << fmt(m.cov.xp) << ',' << fmt(m.cov.pp);
        if (se) {
            const auto &e = s.stderr_moments[i];
            out << ',' << fmt(e.mean.x) << ',' << fmt(e.mean.p) << ',' << fmt(e.cov.xx) << ',' << fmt(e.cov.xp)
                << ',' << fmt(e.cov.pp);
        }
        out << "\n";
    }
}

MomentSeries read_moments_csv(const std::string &path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 6 && t.header.size() != 11) {
        throw Error(ErrorKind::ComparisonMismatch, path + ": unexpected moment columns");
    }
    MomentSeries s;
    s.hash = t.hash;
    for (const auto &r : t.rows) {
        s.tau.push_back(r[0]);
        s.moments.push_back({{r[1], r[2]}, {r[3], r[4], r[4], r[5]}});
        if (r.size() == 11) {
            s.stderr_moments.push_back({{r[6], r[7]}, {r[8], r[9], r[9], r[10]}});
        }
    }
    return s;
}

void write_marginals_csv(const std::string &path, const MarginalSet &set) {
    auto out = open_out(path);
    write_hash_line(out, "marginals", set.hash);
    out << "snapshot,tau,x,density\n";
    for (size_t k = 0; k < set.tau.size(); k++) {
        for (size_t i = 0; i < set.density[k].size(); i++) {
            out << k << ',' << fmt(set.tau[k]) << ',' << fmt(set.x[k][i]) << ',' << fmt(set.density[k][i]) << "\n";
        }
    }
}

MarginalSet read_marginals_csv(const std::string &path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 4) {
        throw Error(ErrorKind::ComparisonMismatch, path + ": unexpected marginal columns");
    }
    MarginalSet s;
    s.hash = t.hash;
    long current = -1;
    for (const auto &r : t.rows) {
        if ((long)r[0] != current) {
            current = (long)r[0];
            s.tau.push_back(r[1]);
            s.x.emplace_back();
            s.density.emplace_back();
        }
        s.x.back().push_back(r[2]);
        s.density.back().push_back(r[3]);
    }
    return s;
}

void write_frames_csv(const std::string &path, const std::string &hash, const FrameRun &run) {
    const FrameRecord &f = run.frames;
    auto out = open_out(path);
    write_hash_line(out, "frames", hash);
    out << "tau,x_c,p_c,alpha,S_xx,S_xp,S_px,S_pp,eta,phi";
    for (const auto &[n, s] : f.beta) {
        out << ",beta" << n;
    }
    for (const auto &[n, s] : f.kappa) {
        out << ",kappa" << n;
    }
    out << ",gamma_eff,sigma_b_sq\n";
    for (size_t i = 0; i < f.size(); i++) {
        const auto &S = f.S[i];
        out << fmt(f.tau[i]) << ',' << fmt(f.centroid[i].x) << ',' << fmt(f.centroid[i].p) << ',' << fmt(f.alpha[i])
            << ',' << fmt(S.xx) << ',' << fmt(S.xp) << ',' << fmt(S.px) << ',' << fmt(S.pp) << ',' << fmt(f.eta[i])
            << ',' << fmt(f.phi[i]);
        for (const auto &[n, s] : f.beta) {
            out << ',' << fmt(s[i]);
        }
        for (const auto &[n, s] : f.kappa) {
            out << ',' << fmt(s[i]);
        }
        out << ',' << fmt(run.gamma_eff[i]) << ',' << fmt(run.sigma_sq[i]) << "\n";
    }
}

void write_report_json(const std::string &path, const ComparisonReport &r) {
    nlohmann::ordered_json j;
    j["config_hash"] = r.hash;
    j["pass"] = r.pass();
    j["eps1_pass"] = r.eps1_pass;
    j["eps2_pass"] = r.eps2_pass;
    j["marginal_pass"] = r.marginal_pass;
    j["max_eps1"] = r.max_eps1;
    j["max_eps2_checked"] = r.max_eps2_checked;
    if (r.tau_max) {
        j["tau_max"] = *r.tau_max;
    }
    j["tau"] = r.tau;
    j["eps1"] = r.eps1;
    j["eps2"] = r.eps2;
    j["chi"] = r.chi;
    nlohmann::ordered_json snaps = nlohmann::ordered_json::array();
    for (size_t k = 0; k < r.snapshot_tau.size(); k++) {
        nlohmann::ordered_json s;
        s["tau"] = r.snapshot_tau[k];
        s["marginal_l1"] = r.marginal_l1[k];
        auto fr = [](const FringeTable &t) {
            nlohmann::ordered_json o;
            o["peak_x"] = t.peak_x;
            o["has_second"] = t.has_second;
            o["main_x"] = t.main_x;
            o["second_x"] = t.second_x;
            o["delta_x_f"] = t.delta_x_f;
            o["visibility"] = t.visibility;
            return o;
        };
        s["fringes_analytic"] = fr(r.fringes_analytic[k]);
        s["fringes_reference"] = fr(r.fringes_reference[k]);
        snaps.push_back(s);
    }
    j["snapshots"] = snaps;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

MomentSeries analytic_series(const ScenarioContext &ctx, const FrameRun &run, const AnalyticRun &a) {
    return {ctx.hash, run.moment_times, a.moments, {}};
}

MomentSeries reference_series(const ScenarioContext &ctx, const ReferenceRun &r) {
    return {ctx.hash, r.ensemble.moment_times, r.ensemble.mean_moments, r.ensemble.stderr_moments};
}

MarginalSet marginal_set(const std::string &hash, const std::vector<Snapshot> &snaps) {
    MarginalSet s;
    s.hash = hash;
    for (const auto &snap : snaps) {
        s.tau.push_back(snap.tau);
        s.x.push_back(snap.density.empty() ? std::vector<double>{} : snap.x);
        s.density.push_back(snap.density);
    }
    return s;
}

}  // namespace wigdyn
