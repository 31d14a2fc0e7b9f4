// Copyright 2026 the detkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace detkit {

/// Base class for all detkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Bad argument or inconsistent configuration (CLI exit code 3).
struct ArgumentError : Error {
    explicit ArgumentError(const std::string &msg) : Error(msg) {}
};

/// Malformed or unreadable input file (CLI exit code 3).
struct ParseError : Error {
    explicit ParseError(const std::string &msg) : Error(msg) {}
};

/// A requested attack or construction is infeasible in the given
/// parameter regime (CLI exit code 2). Carries the feasibility margin,
/// negative when violated.
struct InfeasibleError : Error {
    double margin;
    InfeasibleError(const std::string &msg, double margin_)
        : Error(msg), margin(margin_) {}
};

/// Numerical routine failed to converge or produced an inconsistent
/// result (CLI exit code 4).
struct NumericalError : Error {
    double residual;
    explicit NumericalError(const std::string &msg, double residual_ = 0.0)
        : Error(msg), residual(residual_) {}
};

} // namespace detkit
