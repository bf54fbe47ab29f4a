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
#include "hrisloc/errors.hpp"

namespace hrisloc {

const char *to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::CoincidentPoints:
        return "CoincidentPoints";
    case ErrorKind::NotUnit:
        return "NotUnit";
    case ErrorKind::DegenerateGeometry:
        return "DegenerateGeometry";
    case ErrorKind::OddT:
        return "OddT";
    case ErrorKind::DimensionMismatch:
        return "DimensionMismatch";
    case ErrorKind::InvalidConfig:
        return "InvalidConfig";
    case ErrorKind::SingularFIM:
        return "SingularFIM";
    case ErrorKind::SingularReducedFIM:
        return "SingularReducedFIM";
    case ErrorKind::WeakSignal:
        return "WeakSignal";
    case ErrorKind::DegenerateTriangle:
        return "DegenerateTriangle";
    case ErrorKind::DegenerateDirections:
        return "DegenerateDirections";
    case ErrorKind::Io:
        return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what)
{
}

SingularMatrixError::SingularMatrixError(ErrorKind kind, const std::string &what, double condition)
    : Error(kind, what + " (condition " + std::to_string(condition) + ")"), condition_(condition)
{
}

} // namespace hrisloc
