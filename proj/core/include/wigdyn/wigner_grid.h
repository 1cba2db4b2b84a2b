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

#ifndef WIGDYN_WIGNER_GRID_H
#define WIGDYN_WIGNER_GRID_H

#include <cstdint>
#include <string>
#include <vector>

namespace wigdyn {

enum class FrameTag { Lab, Centroid, Gaussian };

const char *frame_tag_name(FrameTag tag);
FrameTag parse_frame_tag(const std::string &name);

/// Rectangular window with inclusive uniform axes.
struct GridWindow {
    double x_min = -1, x_max = 1;
    size_t nx = 2;
    double p_min = -1, p_max = 1;
    size_t np = 2;

    double dx() const {
        return (x_max - x_min) / (double)(nx - 1);
    }
    double dp() const {
        return (p_max - p_min) / (double)(np - 1);
    }
    double x(size_t i) const {
        return x_min + dx() * (double)i;
    }
    double p(size_t j) const {
        return p_min + dp() * (double)j;
    }
    std::vector<double> x_axis() const;
    std::vector<double> p_axis() const;
};

/// Sampled Wigner function, row-major with x as the slow index:
/// values[i * np + j] = W(x_i, p_j).
struct WignerGrid {
    GridWindow window;
    std::vector<double> values;
    double tau = 0;
    FrameTag frame = FrameTag::Centroid;

    double at(size_t i, size_t j) const {
        return values[i * window.np + j];
    }
    double &at(size_t i, size_t j) {
        return values[i * window.np + j];
    }
    /// Trapezoid integral over the window.
    double integral() const;
    /// Trapezoid integral over p at each x.
    std::vector<double> x_marginal() const;
    std::vector<double> p_marginal() const;
    double min_value() const;
};

/// int |a - b| / int |b| on identical windows.
double normalized_l1(const WignerGrid &a, const WignerGrid &b);

/// Writes `<stem>.bin` (little-endian float64, row-major) and `<stem>.json`
/// with {nx, np, x_min, x_max, p_min, p_max, tau, frame_tag, config_hash}.
void write_wigner_grid(const WignerGrid &grid, const std::string &stem, const std::string &config_hash);
WignerGrid read_wigner_grid(const std::string &stem, std::string *config_hash = nullptr);

}  // namespace wigdyn

#endif
