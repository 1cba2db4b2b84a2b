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

#ifndef WIGDYN_NUMERICS_H
#define WIGDYN_NUMERICS_H

#include <functional>
#include <span>
#include <vector>

namespace wigdyn {

/// Running integral on a (possibly nonuniform) grid, trapezoid rule.
std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> t);

/// Running integral where each interval is integrated exactly for the
/// parabola through it and one neighbour. Third order on smooth data; used
/// as the refinement check for the trapezoid result.
std::vector<double> cumulative_simpson(std::span<const double> f, std::span<const double> t);

/// Three-point derivative on a nonuniform grid (exact for parabolas).
/// One-sided at the ends.
std::vector<double> central_derivative(std::span<const double> f, std::span<const double> t);

/// Linear interpolation; t must be increasing. Clamps outside the range.
double interp_linear(std::span<const double> t, std::span<const double> f, double t0);

/// Root of a cubic Hermite interpolant between (t0, f0, df0) and
/// (t1, f1, df1), assuming f0 and f1 bracket zero. Bisection to `tol`.
double hermite_root(double t0, double f0, double df0, double t1, double f1, double df1, double tol = 1e-13);

/// Cubic Hermite interpolation at t in [t0, t1].
double hermite_eval(double t0, double f0, double df0, double t1, double f1, double df1, double t);

/// Largest |a - b| / scale over aligned arrays, with scale = max |b|.
double max_relative_gap(std::span<const double> a, std::span<const double> b);

/// Uniformly spaced axis of n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, size_t n);

/// Smallest power of two >= n.
size_t next_pow2(size_t n);

}  // namespace wigdyn

#endif
