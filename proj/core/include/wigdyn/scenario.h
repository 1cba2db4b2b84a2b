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

#ifndef WIGDYN_SCENARIO_H
#define WIGDYN_SCENARIO_H

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "wigdyn/analytic_wigner.h"
#include "wigdyn/decoherence.h"
#include "wigdyn/potential.h"
#include "wigdyn/wigner_grid.h"

namespace wigdyn {

constexpr int kScenarioSchemaVersion = 1;

struct PotentialSpec {
    /// "double_well", "polynomial" or "harmonic".
    std::string kind = "double_well";
    double d = 0;
    /// Taylor coefficients for "polynomial"; coefficients[n] multiplies x^n.
    std::vector<double> coefficients;
    int truncation_order = 4;

    PotentialModel build() const;
};

struct ScheduleSpec {
    bool automatic = true;
    double delta = 0;
    /// Used when not automatic.
    std::vector<AngleSegment> segments;
};

struct ReferenceGridSpec {
    /// n = 0 sizes the grid automatically (double well only).
    size_t n = 0;
    double x_min = 0;
    double x_max = 0;
    double dtau = 1e-3;
    size_t n_traj = 1;
    unsigned threads = 0;
};

struct ScenarioGrids {
    ReferenceGridSpec reference;
    /// Spacing of the shared moment time grid.
    double moment_dtau = 0.01;
    size_t wigner_nx = 128;
    size_t wigner_np = 128;
    FrameTag wigner_frame = FrameTag::Centroid;
    /// Points of the position-marginal axis.
    size_t marginal_points = 4096;
    /// Half width of the marginal axis around the centroid; 0 means automatic.
    double marginal_half_width = 0;
    size_t compose_nx = 256;
    size_t compose_np = 512;
};

/// Every field a run depends on. Decoherence strengths are dimensionless:
/// gamma_loc in units of omega_t, S1 and S2 in units of 1 / omega_t.
struct ScenarioConfig {
    int schema_version = kScenarioSchemaVersion;
    std::string name;
    PotentialSpec potential;
    /// omega / omega_t.
    double freq_ratio = 0;
    double x_s = 0;
    double n_bar = 0;
    DecoherenceParams decoherence;
    /// 0 means twice the first turning point.
    double tau_end = 0;
    /// Largest step of the frame integration.
    double dtau = 1e-4;
    ScheduleSpec schedule;
    std::string output_dir = "out";
    uint64_t seed = 0;
    ScenarioGrids grids;
    /// Empty means the default instants.
    std::vector<double> snapshots;
    /// Candidate offsets for calibrate-delta.
    std::vector<double> delta_candidates;

    FreqRatio ratio() const {
        return FreqRatio::from_potential_over_trap(freq_ratio);
    }
};

/// Parses and validates. Errors are ConfigError naming the JSON key path.
ScenarioConfig config_from_json(const nlohmann::json &doc);
nlohmann::ordered_json config_to_json(const ScenarioConfig &config);
ScenarioConfig load_config(const std::string &path);

/// Checks the physical invariants; throws ConfigError.
void validate_config(const ScenarioConfig &config);

/// 64-bit FNV-1a of the canonical serialisation without output_dir, as 16
/// hex digits.
std::string config_hash(const ScenarioConfig &config);

/// The built-in scenarios used by tests and the acceptance binary.
ScenarioConfig table1_config();
ScenarioConfig desk_config();

}  // namespace wigdyn

#endif
