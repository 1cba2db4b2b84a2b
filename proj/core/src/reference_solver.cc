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

#include "wigdyn/reference_solver.h"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "wigdyn/errors.h"
#include "wigdyn/numerics.h"

namespace wigdyn {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex &plan_mutex() {
    static std::mutex m;
    return m;
}

class Fft {
   public:
    explicit Fft(size_t n) : n_(n) {
        buf_ = fftw_alloc_complex(n);
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd_ = fftw_plan_dft_1d((int)n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d((int)n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft(const Fft &) = delete;
    Fft &operator=(const Fft &) = delete;

    cplx *data() {
        return reinterpret_cast<cplx *>(buf_);
    }
    void forward() {
        fftw_execute(fwd_);
    }
    /// Unnormalised.
    void backward() {
        fftw_execute(bwd_);
    }
    size_t size() const {
        return n_;
    }

   private:
    size_t n_;
    fftw_complex *buf_;
    fftw_plan fwd_, bwd_;
};

std::vector<double> wavenumbers(const SpatialGrid &g) {
    std::vector<double> k(g.n);
    for (size_t m = 0; m < g.n; m++) {
        long mm = (m < g.n / 2) ? (long)m : (long)m - (long)g.n;
        k[m] = 2 * kPi * (double)mm / ((double)g.n * g.dx);
    }
    return k;
}

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

uint64_t trajectory_seed(uint64_t master, uint64_t index) {
    return splitmix64(master + index);
}

double SpatialGrid::p_max() const {
    return 2 * kPi / dx;
}

SpatialGrid SpatialGrid::span(double lo, double hi, size_t n) {
    if (n < 2 || !(hi > lo)) {
        throw Error(ErrorKind::DomainError, "spatial grid needs hi > lo and n >= 2");
    }
    return {lo, (hi - lo) / (double)n, n};
}

SpatialGrid suggest_double_well_grid(double d, double x_s, FreqRatio ratio, double n_bar) {
    const double r = ratio.r();
    const double v = 2 * n_bar + 1;
    // 2 r H = U + r^2 p^2 / 2. Momentum fluctuations of ten standard
    // deviations raise U by 50 r^2 v, which for small d lifts the packet over
    // the barrier, so the outer turning point of that energy sets the range.
    double u_s = 0.5 * (-x_s * x_s + std::pow(x_s, 4) / (2 * d * d));
    double u_tail = u_s + 50 * r * r * v;
    // U = y^2 / (4 d^2) - y / 2 with y = x^2.
    double y = d * d * (1 + std::sqrt(1 + 4 * u_tail / (d * d)));
    double half = 1.2 * std::sqrt(std::max(y, 2 * d * d - x_s * x_s));
    double p_cl = std::sqrt(2 * (u_s + d * d / 4)) / r;
    double p_need = 2 * (p_cl + 10 * std::sqrt(v));
    double dx = 2 * kPi / p_need;
    size_t n = next_pow2((size_t)std::ceil(2 * half / dx));
    return SpatialGrid::span(-half, half, n);
}

double WaveFunction::norm() const {
    double acc = 0;
    for (const auto &v : psi) {
        acc += std::norm(v);
    }
    return acc * grid.dx;
}

WaveFunction coherent_state(const SpatialGrid &grid, PhasePoint mean) {
    WaveFunction wf;
    wf.grid = grid;
    wf.psi.resize(grid.n);
    double c = std::pow(2 * kPi, -0.25);
    for (size_t i = 0; i < grid.n; i++) {
        double u = grid.x(i) - mean.x;
        wf.psi[i] = std::polar(c * std::exp(-u * u / 4), mean.p * grid.x(i) / 2);
    }
    return wf;
}

GaussianMoments RawMoments::central() const {
    double cxp = xp - x * p;
    return {{x, p}, {xx - x * x, cxp, cxp, pp - p * p}};
}

RawMoments RawMoments::operator+(const RawMoments &o) const {
    return {x + o.x, p + o.p, xx + o.xx, xp + o.xp, pp + o.pp};
}

RawMoments RawMoments::operator*(double s) const {
    return {x * s, p * s, xx * s, xp * s, pp * s};
}

namespace {

RawMoments moments_with(const WaveFunction &wf, Fft &fft, const std::vector<double> &k) {
    const auto &g = wf.grid;
    RawMoments m;
    double norm = 0;
    for (size_t i = 0; i < g.n; i++) {
        double w = std::norm(wf.psi[i]);
        double x = g.x(i);
        norm += w;
        m.x += w * x;
        m.xx += w * x * x;
    }
    cplx *b = fft.data();
    std::copy(wf.psi.begin(), wf.psi.end(), b);
    fft.forward();
    double knorm = 0;
    for (size_t i = 0; i < g.n; i++) {
        double w = std::norm(b[i]);
        knorm += w;
        m.p += w * 2 * k[i];
        m.pp += w * 4 * k[i] * k[i];
        b[i] *= 2 * k[i] / (double)g.n;
    }
    fft.backward();
    double xp = 0;
    for (size_t i = 0; i < g.n; i++) {
        xp += (std::conj(wf.psi[i]) * g.x(i) * b[i]).real();
    }
    m.x /= norm;
    m.xx /= norm;
    m.p /= knorm;
    m.pp /= knorm;
    m.xp = xp / norm;
    return m;
}

}  // namespace

RawMoments measure_moments(const WaveFunction &wf) {
    Fft fft(wf.grid.n);
    return moments_with(wf, fft, wavenumbers(wf.grid));
}

EvolveResult split_operator_evolve(
    const PotentialModel &model,
    FreqRatio ratio,
    WaveFunction wf,
    const EvolveOptions &opt,
    const std::optional<NoiseSettings> &noise) {
    const SpatialGrid &g = wf.grid;
    const size_t n = g.n;
    const double r = ratio.r();
    if (!(opt.dtau > 0)) {
        throw Error(ErrorKind::DomainError, "time step must be positive");
    }
    if (std::abs(wf.norm() - 1) > 1e-8) {
        throw Error(ErrorKind::DomainError, "initial wavefunction is not normalised");
    }

    std::vector<double> events(opt.moment_times);
    events.insert(events.end(), opt.state_times.begin(), opt.state_times.end());
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    if (!events.empty() && events.front() < 0) {
        throw Error(ErrorKind::DomainError, "output times must be nonnegative");
    }

    std::vector<double> u(n), du(n), k = wavenumbers(g);
    for (size_t i = 0; i < n; i++) {
        u[i] = model.value(g.x(i));
        du[i] = model.eval_derivative(1, g.x(i));
    }

    const bool noisy = noise && noise->params.any();
    std::mt19937_64 rng(noise ? noise->seed : 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Fft fft(n);
    cplx *b = fft.data();
    std::copy(wf.psi.begin(), wf.psi.end(), b);

    double cached_h = -1;
    std::vector<cplx> kin_half(n), kin_full(n), pot(n);
    auto prepare = [&](double h) {
        if (h == cached_h) {
            return;
        }
        cached_h = h;
        for (size_t i = 0; i < n; i++) {
            kin_half[i] = std::polar(1.0 / (double)n, -r * k[i] * k[i] * h / 2);
            kin_full[i] = std::polar(1.0 / (double)n, -r * k[i] * k[i] * h);
            if (!noisy) {
                pot[i] = std::polar(1.0, -h * u[i] / (2 * r));
            }
        }
    };
    auto kinetic = [&](const std::vector<cplx> &phase) {
        fft.forward();
        for (size_t i = 0; i < n; i++) {
            b[i] *= phase[i];
        }
        fft.backward();
    };
    auto potential = [&](double h) {
        if (!noisy) {
            for (size_t i = 0; i < n; i++) {
                b[i] *= pot[i];
            }
            return;
        }
        const auto &p = noise->params;
        double z1 = p.s1 > 0 ? normal(rng) * std::sqrt(2 * kPi * (p.s1 / r) / h) : 0.0;
        double z2 = p.s2 > 0 ? normal(rng) * std::sqrt(2 * kPi * (p.s2 / r) / h) : 0.0;
        double kick = p.gamma_loc > 0 ? std::sqrt(r * p.gamma_loc) * normal(rng) * std::sqrt(h) : 0.0;
        for (size_t i = 0; i < n; i++) {
            double ph = h * (u[i] * (1 + z2) - z1 * du[i]) / (2 * r) + kick * g.x(i);
            b[i] *= std::polar(1.0, -ph);
        }
    };

    const size_t edge = std::max<size_t>(1, n / 20);
    double last_norm = 1;
    size_t steps_since = 0;
    auto check = [&](double t) {
        double tail = 0, total = 0;
        for (size_t i = 0; i < n; i++) {
            double w = std::norm(b[i]);
            total += w;
            if (i < edge || i >= n - edge) {
                tail += w;
            }
        }
        total *= g.dx;
        tail *= g.dx;
        if (steps_since > 0 && std::abs(total - last_norm) > 1e-8 * (double)steps_since) {
            std::ostringstream ss;
            ss << "norm drifted to " << total << " at tau=" << t;
            throw Error(ErrorKind::StepAccuracy, ss.str());
        }
        if (tail > opt.overflow_tail) {
            std::ostringstream ss;
            ss << "wavepacket reached the grid edge (tail mass " << tail << ") at tau=" << t;
            throw Error(ErrorKind::GridOverflow, ss.str());
        }
        last_norm = total;
        steps_since = 0;
    };

    EvolveResult res;
    Fft aux(n);
    auto record = [&](double t) {
        WaveFunction snap{g, std::vector<cplx>(b, b + n)};
        if (std::binary_search(opt.moment_times.begin(), opt.moment_times.end(), t)) {
            res.moment_times.push_back(t);
            res.moments.push_back(moments_with(snap, aux, k));
        }
        if (std::binary_search(opt.state_times.begin(), opt.state_times.end(), t)) {
            res.state_times.push_back(t);
            res.states.push_back(std::move(snap));
        }
    };

    double t = 0;
    for (double target : events) {
        if (target > t) {
            size_t steps = (size_t)std::ceil((target - t) / opt.dtau - 1e-9);
            steps = std::max<size_t>(steps, 1);
            double h = (target - t) / (double)steps;
            prepare(h);
            kinetic(kin_half);
            for (size_t s = 1; s <= steps; s++) {
                potential(h);
                kinetic(s == steps ? kin_half : kin_full);
                steps_since++;
                if (steps_since >= opt.overflow_check_every && s < steps) {
                    check(t + h * (double)s);
                }
            }
            t = target;
            check(t);
        }
        record(t);
    }
    return res;
}

WignerGrid wigner_transform(const WaveFunction &wf, const GridWindow &win, PhasePoint origin, FrameTag frame) {
    const SpatialGrid &g = wf.grid;
    const size_t n = g.n;
    if (win.nx < 2 || win.np < 2) {
        throw Error(ErrorKind::WindowError, "Wigner window needs at least 2 x 2 points");
    }
    if (origin.x + win.x_min < g.x(0) || origin.x + win.x_max > g.x_max()) {
        throw Error(ErrorKind::WindowError, "Wigner window exceeds the spatial grid");
    }

    // Support of psi bounds the lag sum.
    double top = 0;
    for (const auto &v : wf.psi) {
        top = std::max(top, std::norm(v));
    }
    size_t lo = 0, hi = n - 1;
    while (lo < hi && std::norm(wf.psi[lo]) < 1e-32 * top) {
        lo++;
    }
    while (hi > lo && std::norm(wf.psi[hi]) < 1e-32 * top) {
        hi--;
    }
    size_t half = (hi - lo) / 2 + 2;
    const size_t L = 2 * half + 1;
    const size_t nc = next_pow2(L + win.np);

    Fft shifter(n);
    std::vector<double> k = wavenumbers(g);
    std::vector<cplx> spectrum(n);
    std::copy(wf.psi.begin(), wf.psi.end(), shifter.data());
    shifter.forward();
    std::copy(shifter.data(), shifter.data() + n, spectrum.begin());

    // Lag y = 2 m dx, so e^(-i p y / 2) = e^(-i p m dx). Chirp-z:
    // sum_m a_m e^(-i theta m j) with theta = dp dx.
    const double theta = win.dp() * g.dx;
    auto chirp = [&](double q) { return std::polar(1.0, std::fmod(theta * q * q / 2, 2 * kPi)); };
    Fft conv(nc);
    std::vector<cplx> vhat(nc);
    {
        cplx *c = conv.data();
        std::fill(c, c + nc, cplx(0));
        for (long q = -(long)(L - 1); q < (long)win.np; q++) {
            c[(q + (long)nc) % (long)nc] = chirp((double)q);
        }
        conv.forward();
        std::copy(c, c + nc, vhat.begin());
    }

    WignerGrid out;
    out.window = win;
    out.frame = frame;
    out.values.resize(win.nx * win.np);
    const double p0 = origin.p + win.p_min;
    for (size_t i = 0; i < win.nx; i++) {
        double x = origin.x + win.x(i);
        double u = (x - g.x(0)) / g.dx;
        long i0 = std::lround(u);
        double f = u - (double)i0;
        cplx *s = shifter.data();
        for (size_t m = 0; m < n; m++) {
            s[m] = spectrum[m] * std::polar(1.0 / (double)n, k[m] * f * g.dx);
        }
        shifter.backward();  // s[j] = psi(x_j + f dx)

        cplx *c = conv.data();
        std::fill(c, c + nc, cplx(0));
        for (size_t mp = 0; mp < L; mp++) {
            long m = (long)mp - (long)half;
            long ia = i0 + m, ib = i0 - m;
            if (ia < 0 || ib < 0 || ia >= (long)n || ib >= (long)n) {
                continue;
            }
            cplx gm = s[ia] * std::conj(s[ib]);
            cplx a = gm * std::polar(1.0, -p0 * (double)m * g.dx);
            c[mp] = a * std::conj(chirp((double)mp));
        }
        conv.forward();
        for (size_t m = 0; m < nc; m++) {
            c[m] *= vhat[m] / (double)nc;
        }
        conv.backward();
        for (size_t j = 0; j < win.np; j++) {
            // Index offset -half in m contributes e^(i theta half j).
            cplx val = c[j] * std::conj(chirp((double)j)) * std::polar(1.0, std::fmod(theta * (double)half * (double)j, 2 * kPi));
            // dy / (4 pi) with dy = 2 dx.
            out.at(i, j) = (g.dx / (2 * kPi)) * val.real();
        }
    }
    return out;
}

EnsembleResult ensemble_average(const EnsembleConfig &cfg) {
    if (!cfg.model) {
        throw Error(ErrorKind::ConfigError, "ensemble needs a potential");
    }
    if (cfg.n_traj < 1) {
        throw Error(ErrorKind::DomainError, "ensemble needs at least one trajectory");
    }
    struct TrajOut {
        EvolveResult res;
        std::vector<std::vector<double>> density;
    };
    auto run_one = [&](size_t idx) {
        uint64_t seed = trajectory_seed(cfg.seed, idx);
        std::mt19937_64 init_rng(splitmix64(seed ^ 0x5bd1e995ULL));
        std::normal_distribution<double> normal(0.0, 1.0);
        PhasePoint start = cfg.start;
        if (cfg.n_bar > 0) {
            double sd = std::sqrt(2 * cfg.n_bar);
            start.x += sd * normal(init_rng);
            start.p += sd * normal(init_rng);
        }
        NoiseSettings ns{cfg.noise, seed};
        TrajOut o;
        o.res = split_operator_evolve(
            *cfg.model, cfg.ratio, coherent_state(cfg.grid, start), cfg.evolve,
            cfg.noise.any() ? std::optional<NoiseSettings>(ns) : std::nullopt);
        for (auto &s : o.res.states) {
            std::vector<double> d(s.psi.size());
            for (size_t i = 0; i < d.size(); i++) {
                d[i] = std::norm(s.psi[i]);
            }
            o.density.push_back(std::move(d));
        }
        o.res.states.clear();
        return o;
    };

    EnsembleResult out;
    out.n_traj = cfg.n_traj;
    std::vector<std::vector<RawMoments>> raw(cfg.n_traj);
    std::vector<std::vector<double>> dens_sum;

    std::mutex mu;
    std::map<size_t, TrajOut> pending;
    size_t next_reduce = 0;
    auto reduce_ready = [&]() {
        // Fixed trajectory order keeps the sums independent of scheduling.
        while (true) {
            auto it = pending.find(next_reduce);
            if (it == pending.end()) {
                return;
            }
            TrajOut &o = it->second;
            if (next_reduce == 0) {
                out.moment_times = o.res.moment_times;
                out.state_times = o.res.state_times;
                dens_sum.assign(o.density.size(), {});
                for (size_t s = 0; s < o.density.size(); s++) {
                    dens_sum[s].assign(o.density[s].size(), 0.0);
                }
            }
            raw[next_reduce] = std::move(o.res.moments);
            for (size_t s = 0; s < o.density.size(); s++) {
                for (size_t i = 0; i < o.density[s].size(); i++) {
                    dens_sum[s][i] += o.density[s][i];
                }
            }
            pending.erase(it);
            next_reduce++;
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = (unsigned)std::min<size_t>(threads, cfg.n_traj);
    std::atomic<size_t> counter{0};
    std::exception_ptr failure;
    auto worker = [&]() {
        while (true) {
            size_t idx = counter.fetch_add(1);
            if (idx >= cfg.n_traj) {
                return;
            }
            try {
                TrajOut o = run_one(idx);
                std::lock_guard<std::mutex> lock(mu);
                pending.emplace(idx, std::move(o));
                reduce_ready();
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                counter = cfg.n_traj;
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; t++) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    const size_t nt = cfg.n_traj;
    const size_t ntimes = out.moment_times.size();
    for (size_t s = 0; s < ntimes; s++) {
        RawMoments sum;
        for (size_t j = 0; j < nt; j++) {
            sum = sum + raw[j][s];
        }
        out.mean_moments.push_back((sum * (1.0 / (double)nt)).central());
        GaussianMoments se{{0, 0}, Mat2::zero()};
        if (nt > 1) {
            std::vector<GaussianMoments> loo;
            GaussianMoments avg{{0, 0}, Mat2::zero()};
            for (size_t j = 0; j < nt; j++) {
                GaussianMoments c = ((sum + raw[j][s] * -1.0) * (1.0 / (double)(nt - 1))).central();
                loo.push_back(c);
                avg.mean = avg.mean + c.mean * (1.0 / (double)nt);
                avg.cov = avg.cov + c.cov * (1.0 / (double)nt);
            }
            double f = (double)(nt - 1) / (double)nt;
            double vx = 0, vp = 0, vxx = 0, vxp = 0, vpp = 0;
            for (const auto &c : loo) {
                vx += std::pow(c.mean.x - avg.mean.x, 2);
                vp += std::pow(c.mean.p - avg.mean.p, 2);
                vxx += std::pow(c.cov.xx - avg.cov.xx, 2);
                vxp += std::pow(c.cov.xp - avg.cov.xp, 2);
                vpp += std::pow(c.cov.pp - avg.cov.pp, 2);
            }
            se.mean = {std::sqrt(f * vx), std::sqrt(f * vp)};
            se.cov = {std::sqrt(f * vxx), std::sqrt(f * vxp), std::sqrt(f * vxp), std::sqrt(f * vpp)};
        }
        out.stderr_moments.push_back(se);
    }
    for (auto &d : dens_sum) {
        for (double &v : d) {
            v /= (double)nt;
        }
    }
    out.mean_density = std::move(dens_sum);
    return out;
}

}  // namespace wigdyn
