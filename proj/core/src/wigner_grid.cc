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

#include "wigdyn/wigner_grid.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "wigdyn/errors.h"

namespace wigdyn {

const char *frame_tag_name(FrameTag tag) {
    switch (tag) {
        case FrameTag::Lab:
            return "lab";
        case FrameTag::Centroid:
            return "centroid";
        case FrameTag::Gaussian:
            return "gaussian";
    }
    return "unknown";
}

FrameTag parse_frame_tag(const std::string &name) {
    if (name == "lab") {
        return FrameTag::Lab;
    }
    if (name == "centroid") {
        return FrameTag::Centroid;
    }
    if (name == "gaussian") {
        return FrameTag::Gaussian;
    }
    throw Error(ErrorKind::ConfigError, "unknown frame tag '" + name + "'");
}

std::vector<double> GridWindow::x_axis() const {
    std::vector<double> out(nx);
    for (size_t i = 0; i < nx; i++) {
        out[i] = x(i);
    }
    return out;
}

std::vector<double> GridWindow::p_axis() const {
    std::vector<double> out(np);
    for (size_t j = 0; j < np; j++) {
        out[j] = p(j);
    }
    return out;
}

namespace {

double trapezoid_weight(size_t i, size_t n) {
    return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace

double WignerGrid::integral() const {
    double acc = 0;
    for (size_t i = 0; i < window.nx; i++) {
        double row = 0;
        for (size_t j = 0; j < window.np; j++) {
            row += trapezoid_weight(j, window.np) * at(i, j);
        }
        acc += trapezoid_weight(i, window.nx) * row;
    }
    return acc * window.dx() * window.dp();
}

std::vector<double> WignerGrid::x_marginal() const {
    std::vector<double> out(window.nx, 0.0);
    for (size_t i = 0; i < window.nx; i++) {
        double row = 0;
        for (size_t j = 0; j < window.np; j++) {
            row += trapezoid_weight(j, window.np) * at(i, j);
        }
        out[i] = row * window.dp();
    }
    return out;
}

std::vector<double> WignerGrid::p_marginal() const {
    std::vector<double> out(window.np, 0.0);
    for (size_t i = 0; i < window.nx; i++) {
        double w = trapezoid_weight(i, window.nx) * window.dx();
        for (size_t j = 0; j < window.np; j++) {
            out[j] += w * at(i, j);
        }
    }
    return out;
}

double WignerGrid::min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double normalized_l1(const WignerGrid &a, const WignerGrid &b) {
    if (a.values.size() != b.values.size() || a.window.nx != b.window.nx || a.window.np != b.window.np) {
        throw Error(ErrorKind::ComparisonMismatch, "Wigner grids have different shapes");
    }
    double num = 0, den = 0;
    for (size_t k = 0; k < a.values.size(); k++) {
        num += std::abs(a.values[k] - b.values[k]);
        den += std::abs(b.values[k]);
    }
    return den > 0 ? num / den : num;
}

void write_wigner_grid(const WignerGrid &grid, const std::string &stem, const std::string &config_hash) {
    static_assert(std::endian::native == std::endian::little, "binary grids are written little-endian");
    std::ofstream bin(stem + ".bin", std::ios::binary);
    if (!bin) {
        throw Error(ErrorKind::ConfigError, "cannot write " + stem + ".bin");
    }
    bin.write(reinterpret_cast<const char *>(grid.values.data()), (std::streamsize)(grid.values.size() * sizeof(double)));

    nlohmann::ordered_json meta;
    meta["nx"] = grid.window.nx;
    meta["np"] = grid.window.np;
    meta["x_min"] = grid.window.x_min;
    meta["x_max"] = grid.window.x_max;
    meta["p_min"] = grid.window.p_min;
    meta["p_max"] = grid.window.p_max;
    meta["tau"] = grid.tau;
    meta["frame_tag"] = frame_tag_name(grid.frame);
    meta["config_hash"] = config_hash;
    std::ofstream js(stem + ".json");
    js << meta.dump(2) << "\n";
}

WignerGrid read_wigner_grid(const std::string &stem, std::string *config_hash) {
    std::ifstream js(stem + ".json");
    if (!js) {
        throw Error(ErrorKind::ConfigError, "cannot read " + stem + ".json");
    }
    auto meta = nlohmann::json::parse(js);
    WignerGrid g;
    g.window.nx = meta.at("nx").get<size_t>();
    g.window.np = meta.at("np").get<size_t>();
    g.window.x_min = meta.at("x_min").get<double>();
    g.window.x_max = meta.at("x_max").get<double>();
    g.window.p_min = meta.at("p_min").get<double>();
    g.window.p_max = meta.at("p_max").get<double>();
    g.tau = meta.at("tau").get<double>();
    g.frame = parse_frame_tag(meta.at("frame_tag").get<std::string>());
    if (config_hash) {
        *config_hash = meta.value("config_hash", std::string());
    }
    g.values.resize(g.window.nx * g.window.np);
    std::ifstream bin(stem + ".bin", std::ios::binary);
    bin.read(reinterpret_cast<char *>(g.values.data()), (std::streamsize)(g.values.size() * sizeof(double)));
    if (!bin) {
        throw Error(ErrorKind::ConfigError, "truncated grid file " + stem + ".bin");
    }
    return g;
}

}  // namespace wigdyn
