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

#include "wigdyn/scenario.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wigdyn/errors.h"

namespace wigdyn {

using nlohmann::json;
using nlohmann::ordered_json;

PotentialModel PotentialSpec::build() const {
    if (kind == "double_well") {
        return PotentialModel::double_well(d);
    }
    if (kind == "harmonic") {
        return PotentialModel::harmonic();
    }
    if (kind == "polynomial") {
        return PotentialModel::polynomial(coefficients, std::max(truncation_order + 1, 5));
    }
    throw Error(ErrorKind::ConfigError, "/potential/kind: unknown potential '" + kind + "'");
}

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw Error(ErrorKind::ConfigError, path + ": " + what);
}

// Typed access with JSON-pointer style paths in every message.
class Reader {
   public:
    Reader(const json &node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            fail(path_.empty() ? "/" : path_, "expected an object");
        }
    }

    bool has(const char *key) const {
        return node_.contains(key);
    }
    std::string path(const char *key) const {
        return path_ + "/" + key;
    }
    const json &at(const char *key) const {
        if (!node_.contains(key)) {
            fail(path(key), "missing required key");
        }
        return node_.at(key);
    }
    Reader child(const char *key) const {
        return Reader(at(key), path(key));
    }

    double number(const char *key) const {
        const json &v = at(key);
        if (!v.is_number()) {
            fail(path(key), "expected a number");
        }
        return v.get<double>();
    }
    double number_or(const char *key, double dflt) const {
        return has(key) ? number(key) : dflt;
    }
    uint64_t count_or(const char *key, uint64_t dflt) const {
        if (!has(key)) {
            return dflt;
        }
        const json &v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
            fail(path(key), "expected a nonnegative integer");
        }
        return v.get<uint64_t>();
    }
    std::string string(const char *key) const {
        const json &v = at(key);
        if (!v.is_string()) {
            fail(path(key), "expected a string");
        }
        return v.get<std::string>();
    }
    std::string string_or(const char *key, const std::string &dflt) const {
        return has(key) ? string(key) : dflt;
    }
    std::vector<double> numbers_or(const char *key) const {
        std::vector<double> out;
        if (!has(key)) {
            return out;
        }
        const json &v = at(key);
        if (!v.is_array()) {
            fail(path(key), "expected an array of numbers");
        }
        for (size_t i = 0; i < v.size(); i++) {
            if (!v[i].is_number()) {
                fail(path(key) + "/" + std::to_string(i), "expected a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

   private:
    const json &node_;
    std::string path_;
};

}  // namespace

ScenarioConfig config_from_json(const json &doc) {
    Reader root(doc, "");
    ScenarioConfig c;
    c.schema_version = (int)root.count_or("schema_version", 0);
    if (!root.has("schema_version")) {
        fail("/schema_version", "missing required key");
    }
    if (c.schema_version != kScenarioSchemaVersion) {
        fail("/schema_version", "unsupported version " + std::to_string(c.schema_version));
    }
    c.name = root.string_or("name", "");

    Reader pot = root.child("potential");
    c.potential.kind = pot.string("kind");
    if (c.potential.kind == "double_well") {
        c.potential.d = pot.number("d");
    } else if (c.potential.kind == "polynomial") {
        c.potential.coefficients = pot.numbers_or("coefficients");
        if (!pot.has("coefficients")) {
            fail(pot.path("coefficients"), "missing required key");
        }
    } else if (c.potential.kind != "harmonic") {
        fail(pot.path("kind"), "unknown potential '" + c.potential.kind + "'");
    }
    c.potential.truncation_order = (int)pot.count_or("truncation_order", 4);

    c.freq_ratio = root.number("freq_ratio");
    c.x_s = root.number("x_s");
    c.n_bar = root.number_or("n_bar", 0);
    if (root.has("decoherence")) {
        Reader dec = root.child("decoherence");
        c.decoherence.gamma_loc = dec.number_or("gamma_loc", 0);
        c.decoherence.s1 = dec.number_or("S1", 0);
        c.decoherence.s2 = dec.number_or("S2", 0);
    }
    c.tau_end = root.number_or("tau_end", 0);
    c.dtau = root.number_or("dtau", 1e-4);

    if (root.has("angle_schedule")) {
        const json &s = root.at("angle_schedule");
        if (s.is_string()) {
            if (s.get<std::string>() != "auto") {
                fail("/angle_schedule", "expected \"auto\" or an object");
            }
        } else {
            Reader sch = root.child("angle_schedule");
            c.schedule.delta = sch.number_or("delta", 0);
            if (sch.has("segments")) {
                c.schedule.automatic = false;
                const json &segs = sch.at("segments");
                if (!segs.is_array() || segs.empty()) {
                    fail(sch.path("segments"), "expected a nonempty array");
                }
                for (size_t i = 0; i < segs.size(); i++) {
                    Reader seg(segs[i], sch.path("segments") + "/" + std::to_string(i));
                    c.schedule.segments.push_back(
                        {seg.number("tau_start"), seg.number("tau_end"), seg.number("phi_bar")});
                }
            }
        }
    }
    c.output_dir = root.string_or("output_dir", "out");
    c.seed = root.count_or("seed", 0);

    if (root.has("grids")) {
        Reader g = root.child("grids");
        if (g.has("reference")) {
            Reader r = g.child("reference");
            c.grids.reference.n = r.count_or("n", 0);
            if (c.grids.reference.n > 0) {
                c.grids.reference.x_min = r.number("x_min");
                c.grids.reference.x_max = r.number("x_max");
            }
            c.grids.reference.dtau = r.number_or("dtau", 1e-3);
            c.grids.reference.n_traj = r.count_or("n_traj", 1);
            c.grids.reference.threads = (unsigned)r.count_or("threads", 0);
        }
        c.grids.moment_dtau = g.number_or("moment_dtau", 0.01);
        if (g.has("wigner")) {
            Reader w = g.child("wigner");
            c.grids.wigner_nx = w.count_or("nx", 128);
            c.grids.wigner_np = w.count_or("np", 128);
            c.grids.wigner_frame = parse_frame_tag(w.string_or("frame", "centroid"));
        }
        if (g.has("marginal")) {
            Reader m = g.child("marginal");
            c.grids.marginal_points = m.count_or("points", 4096);
            c.grids.marginal_half_width = m.number_or("half_width", 0);
        }
        if (g.has("compose")) {
            Reader m = g.child("compose");
            c.grids.compose_nx = m.count_or("nx", 256);
            c.grids.compose_np = m.count_or("np", 512);
        }
    }
    c.snapshots = root.numbers_or("snapshots");
    c.delta_candidates = root.numbers_or("delta_candidates");
    validate_config(c);
    return c;
}

ordered_json config_to_json(const ScenarioConfig &c) {
    ordered_json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    ordered_json pot;
    pot["kind"] = c.potential.kind;
    if (c.potential.kind == "double_well") {
        pot["d"] = c.potential.d;
    }
    if (c.potential.kind == "polynomial") {
        pot["coefficients"] = c.potential.coefficients;
    }
    pot["truncation_order"] = c.potential.truncation_order;
    j["potential"] = pot;
    j["freq_ratio"] = c.freq_ratio;
    j["x_s"] = c.x_s;
    j["n_bar"] = c.n_bar;
    j["decoherence"] = {{"gamma_loc", c.decoherence.gamma_loc}, {"S1", c.decoherence.s1}, {"S2", c.decoherence.s2}};
    j["tau_end"] = c.tau_end;
    j["dtau"] = c.dtau;
    if (c.schedule.automatic && c.schedule.delta == 0) {
        j["angle_schedule"] = "auto";
    } else {
        ordered_json s;
        s["delta"] = c.schedule.delta;
        if (!c.schedule.automatic) {
            ordered_json segs = ordered_json::array();
            for (const auto &seg : c.schedule.segments) {
                segs.push_back({{"tau_start", seg.tau_start}, {"tau_end", seg.tau_end}, {"phi_bar", seg.phi_bar}});
            }
            s["segments"] = segs;
        }
        j["angle_schedule"] = s;
    }
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    ordered_json ref;
    ref["n"] = c.grids.reference.n;
    if (c.grids.reference.n > 0) {
        ref["x_min"] = c.grids.reference.x_min;
        ref["x_max"] = c.grids.reference.x_max;
    }
    ref["dtau"] = c.grids.reference.dtau;
    ref["n_traj"] = c.grids.reference.n_traj;
    ref["threads"] = c.grids.reference.threads;
    ordered_json grids;
    grids["reference"] = ref;
    grids["moment_dtau"] = c.grids.moment_dtau;
    grids["wigner"] = {
        {"nx", c.grids.wigner_nx}, {"np", c.grids.wigner_np}, {"frame", frame_tag_name(c.grids.wigner_frame)}};
    grids["marginal"] = {{"points", c.grids.marginal_points}, {"half_width", c.grids.marginal_half_width}};
    grids["compose"] = {{"nx", c.grids.compose_nx}, {"np", c.grids.compose_np}};
    j["grids"] = grids;
    j["snapshots"] = c.snapshots;
    j["delta_candidates"] = c.delta_candidates;
    return j;
}

ScenarioConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ConfigError, "cannot open config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::ConfigError, path + ": " + e.what());
    }
    return config_from_json(doc);
}

void validate_config(const ScenarioConfig &c) {
    auto positive = [](const char *path, double v) {
        if (!(v > 0) || !std::isfinite(v)) {
            fail(path, "must be positive");
        }
    };
    auto nonneg = [](const char *path, double v) {
        if (!(v >= 0) || !std::isfinite(v)) {
            fail(path, "must be nonnegative");
        }
    };
    positive("/freq_ratio", c.freq_ratio);
    positive("/dtau", c.dtau);
    nonneg("/n_bar", c.n_bar);
    nonneg("/tau_end", c.tau_end);
    nonneg("/decoherence/gamma_loc", c.decoherence.gamma_loc);
    nonneg("/decoherence/S1", c.decoherence.s1);
    nonneg("/decoherence/S2", c.decoherence.s2);
    if (c.potential.kind == "double_well") {
        positive("/potential/d", c.potential.d);
        positive("/x_s", c.x_s);
        if (!(c.potential.d > c.x_s)) {
            fail("/x_s", "must be smaller than d");
        }
    } else if (c.potential.kind == "polynomial") {
        if (c.potential.coefficients.empty()) {
            fail("/potential/coefficients", "must not be empty");
        }
    }
    if (c.potential.kind != "double_well" && !(c.tau_end > 0)) {
        fail("/tau_end", "required for potentials without a known turning point");
    }
    if (c.potential.truncation_order < 2) {
        fail("/potential/truncation_order", "must be at least 2");
    }
    positive("/grids/reference/dtau", c.grids.reference.dtau);
    positive("/grids/moment_dtau", c.grids.moment_dtau);
    if (c.grids.reference.n_traj < 1) {
        fail("/grids/reference/n_traj", "must be at least 1");
    }
    if (c.grids.reference.n > 0 && !(c.grids.reference.x_max > c.grids.reference.x_min)) {
        fail("/grids/reference/x_max", "must exceed x_min");
    }
    if (c.grids.wigner_nx < 2 || c.grids.wigner_np < 2) {
        fail("/grids/wigner", "nx and np must be at least 2");
    }
    if (c.grids.marginal_points < 16) {
        fail("/grids/marginal/points", "must be at least 16");
    }
    if (std::abs(c.schedule.delta) >= 0.1) {
        fail("/angle_schedule/delta", "must satisfy |delta| < 0.1");
    }
    for (size_t i = 0; i < c.snapshots.size(); i++) {
        if (!(c.snapshots[i] >= 0)) {
            fail("/snapshots/" + std::to_string(i), "must be nonnegative");
        }
    }
}

std::string config_hash(const ScenarioConfig &config) {
    ordered_json j = config_to_json(config);
    j.erase("output_dir");
    std::string text = j.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

ScenarioConfig table1_config() {
    ScenarioConfig c;
    c.name = "table1";
    c.potential.d = 1e4;
    c.freq_ratio = 1e-2;
    c.x_s = 1e3;
    c.output_dir = "out/table1";
    // The oracle grid for this scenario is about 2^20 points.
    return c;
}

ScenarioConfig desk_config() {
    ScenarioConfig c;
    c.name = "desk";
    c.potential.d = 1e3;
    c.freq_ratio = 1e-2;
    c.x_s = 1e2;
    c.output_dir = "out/desk";
    return c;
}

}  // namespace wigdyn
