// SPDX-License-Identifier: Apache-2.0
//
// hrisloc: joint user and hybrid-RIS localization toolkit
// Copyright (C) 2026 The hrisloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <stdexcept>
#include <string>

namespace hrisloc {

enum class ErrorKind {
    CoincidentPoints,
    NotUnit,
    DegenerateGeometry,
    OddT,
    DimensionMismatch,
    InvalidConfig,
    SingularFIM,
    SingularReducedFIM,
    WeakSignal,
    DegenerateTriangle,
    DegenerateDirections,
    Io,
};

const char *to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string &what);

    ErrorKind kind() const noexcept { return kind_; }
    // Message without the kind prefix.
    const std::string &detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

// Raised when an information matrix fails the eigenvalue test. `condition`
// is lambda_max / lambda_min of the equilibrated matrix (inf if lambda_min <= 0).
class SingularMatrixError : public Error
{
public:
    SingularMatrixError(ErrorKind kind, const std::string &what, double condition);

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace hrisloc
