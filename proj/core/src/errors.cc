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

#include "wigdyn/errors.h"

namespace wigdyn {

const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OrderUnavailable:
            return "OrderUnavailable";
        case ErrorKind::IntegrationAccuracy:
            return "IntegrationAccuracy";
        case ErrorKind::QuadratureAccuracy:
            return "QuadratureAccuracy";
        case ErrorKind::NotApplicable:
            return "NotApplicable";
        case ErrorKind::DomainError:
            return "DomainError";
        case ErrorKind::NotConvergent:
            return "NotConvergent";
        case ErrorKind::StepAccuracy:
            return "StepAccuracy";
        case ErrorKind::GridOverflow:
            return "GridOverflow";
        case ErrorKind::WindowError:
            return "WindowError";
        case ErrorKind::ComparisonMismatch:
            return "ComparisonMismatch";
        case ErrorKind::ConfigError:
            return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {
}

}  // namespace wigdyn
