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

#ifndef WIGDYN_POTENTIAL_H
#define WIGDYN_POTENTIAL_H

#include <string>
#include <vector>

namespace wigdyn {

/// A one-dimensional potential in dimensionless units.
///
/// Two kinds exist. The quartic double well
///     U(x) = (-x^2 + x^4 / (2 d^2)) / 2
/// with minima at x = +-d, and a truncated Taylor series about the origin
///     U(x) = sum_n c_n x^n.
class PotentialModel {
   public:
    enum class Kind { DoubleWell, Polynomial };

    static PotentialModel double_well(double d);

    /// `coeffs[n]` multiplies x^n. Derivatives are available up to
    /// `max_order`; by default that is one past the degree (and at least 5)
    /// so the decoherence tables, which need order N+1, work for the
    /// default truncation N = 4.
    static PotentialModel polynomial(std::vector<double> coeffs, int max_order = -1);

    /// Harmonic trap U = x^2 / 2.
    static PotentialModel harmonic();

    Kind kind() const {
        return kind_;
    }
    double d() const {
        return d_;
    }
    const std::vector<double> &coeffs() const {
        return coeffs_;
    }
    /// Highest derivative order that may be requested. The double well
    /// answers every order.
    int max_order() const {
        return max_order_;
    }

    /// d^order U / dx^order at x.
    double eval_derivative(int order, double x) const;
    double value(double x) const {
        return eval_derivative(0, x);
    }

    /// d^n U / dx^n at the origin.
    double taylor_derivative(int n) const {
        return eval_derivative(n, 0.0);
    }

    std::string describe() const;

   private:
    PotentialModel() = default;
    Kind kind_ = Kind::DoubleWell;
    double d_ = 0;
    std::vector<double> coeffs_;
    int max_order_ = 0;
};

}  // namespace wigdyn

#endif
