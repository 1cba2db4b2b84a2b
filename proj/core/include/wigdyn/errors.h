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

#ifndef WIGDYN_ERRORS_H
#define WIGDYN_ERRORS_H

#include <stdexcept>
#include <string>

namespace wigdyn {

enum class ErrorKind {
    OrderUnavailable,
    IntegrationAccuracy,
    QuadratureAccuracy,
    NotApplicable,
    DomainError,
    NotConvergent,
    StepAccuracy,
    GridOverflow,
    WindowError,
    ComparisonMismatch,
    ConfigError,
};

const char *error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// command line front end can map it to an exit code.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what);
    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

}  // namespace wigdyn

#endif
