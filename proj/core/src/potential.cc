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

#include "wigdyn/potential.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wigdyn/errors.h"

namespace wigdyn {

PotentialModel PotentialModel::double_well(double d) {
    if (!(d > 0) || !std::isfinite(d)) {
        throw Error(ErrorKind::DomainError, "double well width must be positive");
    }
    PotentialModel m;
    m.kind_ = Kind::DoubleWell;
    m.d_ = d;
    m.max_order_ = std::numeric_limits<int>::max();
    return m;
}

PotentialModel PotentialModel::polynomial(std::vector<double> coeffs, int max_order) {
    if (coeffs.empty()) {
        coeffs.push_back(0.0);
    }
    int degree = (int)coeffs.size() - 1;
    if (max_order < 0) {
        max_order = std::max(degree + 1, 5);
    }
    if (max_order < 4) {
        throw Error(ErrorKind::DomainError, "polynomial potentials must supply derivatives up to order 4");
    }
    PotentialModel m;
    m.kind_ = Kind::Polynomial;
    m.coeffs_ = std::move(coeffs);
    m.max_order_ = max_order;
    return m;
}

PotentialModel PotentialModel::harmonic() {
    return polynomial({0.0, 0.0, 0.5});
}

double PotentialModel::eval_derivative(int order, double x) const {
    if (order < 0) {
        throw Error(ErrorKind::DomainError, "negative derivative order");
    }
    if (kind_ == Kind::DoubleWell) {
        double inv = 1.0 / (d_ * d_);
        switch (order) {
            case 0:
                return 0.5 * (-x * x + 0.5 * x * x * x * x * inv);
            case 1:
                return -x + x * x * x * inv;
            case 2:
                return -1 + 3 * x * x * inv;
            case 3:
                return 6 * x * inv;
            case 4:
                return 6 * inv;
            default:
                return 0;
        }
    }

    if (order > max_order_) {
        std::ostringstream ss;
        ss << "derivative order " << order << " exceeds the supplied order " << max_order_;
        throw Error(ErrorKind::OrderUnavailable, ss.str());
    }
    // Horner on the differentiated series: c_n n!/(n-order)! x^(n-order).
    double acc = 0;
    for (int n = (int)coeffs_.size() - 1; n >= order; n--) {
        double falling = 1;
        for (int j = 0; j < order; j++) {
            falling *= n - j;
        }
        acc = acc * x + coeffs_[n] * falling;
    }
    return acc;
}

std::string PotentialModel::describe() const {
    std::ostringstream ss;
    ss.precision(17);
    if (kind_ == Kind::DoubleWell) {
        ss << "double_well(d=" << d_ << ")";
    } else {
        ss << "polynomial(";
        for (size_t k = 0; k < coeffs_.size(); k++) {
            ss << (k ? "," : "") << coeffs_[k];
        }
        ss << ";max_order=" << max_order_ << ")";
    }
    return ss.str();
}

}  // namespace wigdyn
