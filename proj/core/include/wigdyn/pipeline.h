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

#ifndef WIGDYN_PIPELINE_H
#define WIGDYN_PIPELINE_H

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wigdyn/analytic_wigner.h"
#include "wigdyn/gaussian_frame.h"
#include "wigdyn/reference_solver.h"
#include "wigdyn/scenario.h"

namespace wigdyn {

/// A validated config with everything derived from it alone.
struct ScenarioContext {
    ScenarioConfig config;
    PotentialModel model;
    FreqRatio ratio;
    /// Lab-frame initial state.
    GaussianMoments initial;
    double tau_end = 0;
    std::string hash;
};

ScenarioContext make_context(const ScenarioConfig &config);

struct FrameRun {
    FrameRecord frames;
    /// gamma_fluc + gamma_loc along the centroid, units of omega_t.
    std::vector<double> gamma_eff;
    /// Cumulative blurring variance on the frame grid.
    std::vector<double> sigma_sq;
    AngleSchedule schedule;
    AngleChoice first;
    std::optional<double> tau_three;
    std::optional<double> tau_d;
    std::optional<double> tau_max;
    std::vector<double> snapshot_times;
    /// Uniform grid shared by analytic and reference moments.
    std::vector<double> moment_times;
    std::vector<std::string> warnings;
};

FrameRun run_frames(const ScenarioContext &ctx);

/// {0, tau_3, tau_d, tau_max, 2 tau_max - tau_d, 2 tau_max}, keeping the
/// instants that exist and lie in [0, tau_end].
std::vector<double> default_snapshots(const FrameRun &run, double tau_end);

/// Window of a Wigner snapshot, relative to the centroid for the centroid
/// frame and absolute for the lab frame.
GridWindow snapshot_window(const ScenarioContext &ctx, const FrameRun &run, double tau);

/// Oracle grid of the config (explicit or sized for the double well).
SpatialGrid reference_grid(const ScenarioContext &ctx);

/// Lab positions used for every position marginal at tau: the oracle grid
/// points within the marginal half width of the centroid.
std::vector<double> marginal_axis(const ScenarioContext &ctx, const FrameRun &run, double tau);

/// The analytic state at tau in Gaussian-frame coordinates. `delta`
/// overrides the schedule's second-segment offset when given.
std::unique_ptr<GaussianFrameState> analytic_state(
    const ScenarioContext &ctx, const FrameRun &run, double tau, std::optional<double> delta = std::nullopt);

/// Analytic position density on x at tau.
std::vector<double> analytic_marginal(
    const ScenarioContext &ctx,
    const FrameRun &run,
    double tau,
    std::span<const double> x,
    std::optional<double> delta = std::nullopt);

struct Snapshot {
    double tau = 0;
    std::optional<WignerGrid> wigner;
    std::vector<double> x;
    std::vector<double> density;
    /// Why the Wigner grid is missing, if it is.
    std::string note;
};

struct AnalyticRun {
    std::vector<GaussianMoments> moments;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
};

AnalyticRun run_analytic(const ScenarioContext &ctx, const FrameRun &run, bool with_wigner = true);

struct ReferenceRun {
    SpatialGrid grid;
    EnsembleResult ensemble;
    std::vector<Snapshot> snapshots;
};

/// Points an oracle run would need.
size_t estimated_reference_points(const ScenarioContext &ctx);

/// Refuses grids above 2^21 points unless allow_large.
ReferenceRun run_reference(
    const ScenarioContext &ctx, const FrameRun &run, bool allow_large = false, bool with_wigner = true);

// ---------------------------------------------------------------------------
// Comparison.

struct MomentSeries {
    std::string hash;
    std::vector<double> tau;
    std::vector<GaussianMoments> moments;
    /// Empty for analytic series.
    std::vector<GaussianMoments> stderr_moments;
};

struct MarginalSet {
    std::string hash;
    std::vector<double> tau;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> density;
};

struct ComparisonThresholds {
    double eps1 = 1e-2;
    double eps2 = 1e-2;
    /// eps2 is not checked within this distance of tau_max.
    double eps2_exclusion = 0.3;
    double marginal_l1 = 0.05;
};

struct ComparisonReport {
    std::string hash;
    std::vector<double> tau;
    std::vector<double> eps1;
    std::vector<double> eps2;
    /// chi on the same grid, empty when not supplied.
    std::vector<double> chi;
    std::vector<double> snapshot_tau;
    std::vector<double> marginal_l1;
    std::vector<FringeTable> fringes_analytic;
    std::vector<FringeTable> fringes_reference;
    std::optional<double> tau_max;
    double max_eps1 = 0;
    double max_eps2_checked = 0;
    bool eps1_pass = true;
    bool eps2_pass = true;
    /// Checked at the snapshot closest to tau_max.
    bool marginal_pass = true;

    bool pass() const {
        return eps1_pass && eps2_pass && marginal_pass;
    }
};

/// Throws ComparisonMismatch when the hashes or time grids differ.
ComparisonReport compare_runs(
    const MomentSeries &analytic,
    const MomentSeries &reference,
    const MarginalSet *analytic_marginals,
    const MarginalSet *reference_marginals,
    std::optional<double> tau_max,
    const ComparisonThresholds &thresholds = {});

/// chi(tau) of the schedule, resampled on `taus`.
std::vector<double> chi_on(const FrameRun &run, std::span<const double> taus);

// ---------------------------------------------------------------------------
// Artifacts. Every file carries the config hash; CSV numbers use %.17g so
// re-runs are byte identical.

void write_moments_csv(const std::string &path, const MomentSeries &series);
MomentSeries read_moments_csv(const std::string &path);
void write_marginals_csv(const std::string &path, const MarginalSet &set);
MarginalSet read_marginals_csv(const std::string &path);
void write_frames_csv(const std::string &path, const std::string &hash, const FrameRun &run);
void write_report_json(const std::string &path, const ComparisonReport &report);

MomentSeries analytic_series(const ScenarioContext &ctx, const FrameRun &run, const AnalyticRun &a);
MomentSeries reference_series(const ScenarioContext &ctx, const ReferenceRun &r);
MarginalSet marginal_set(const std::string &hash, const std::vector<Snapshot> &snaps);

}  // namespace wigdyn

#endif
