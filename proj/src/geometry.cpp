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
#include "hrisloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrisloc/errors.hpp"

namespace hrisloc {

Rotation::Rotation(const Mat3 &m, double tol) : m_(m)
{
    if (!is_valid(m, tol))
        throw Error(ErrorKind::InvalidConfig, "matrix is not a proper rotation");
}

bool Rotation::is_valid(const Mat3 &m, double tol)
{
    if (!m.allFinite())
        return false;
    const double orth = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    return orth <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Eigen::Matrix<double, 9, 1> Rotation::stacked() const
{
    Eigen::Matrix<double, 9, 1> r;
    r << m_.col(0), m_.col(1), m_.col(2);
    return r;
}

Rotation rotation_from_angles(const RotationAngles &a)
{
    const double ca = std::cos(a.alpha), sa = std::sin(a.alpha);
    const double cb = std::cos(a.beta), sb = std::sin(a.beta);
    const double cg = std::cos(a.gamma), sg = std::sin(a.gamma);

    Mat3 rz, ry, rx;
    rz << ca, sa, 0.0, -sa, ca, 0.0, 0.0, 0.0, 1.0;
    ry << cb, 0.0, sb, 0.0, 1.0, 0.0, -sb, 0.0, cb;
    rx << 1.0, 0.0, 0.0, 0.0, cg, -sg, 0.0, sg, cg;
    return Rotation(rz * ry * rx);
}

Vec3 direction_local(const Rotation &r, const Position &from, const Position &to)
{
    const Vec3 delta = to - from;
    const double dist = delta.norm();
    if (!(dist >= 1e-9))
        throw Error(ErrorKind::CoincidentPoints, "points closer than 1e-9 m");
    return r.matrix().transpose() * (delta / dist);
}

AnglePair angles_from_direction(const Vec3 &q)
{
    const double n = q.norm();
    if (!(std::abs(n - 1.0) <= 1e-9))
        throw Error(ErrorKind::NotUnit, "direction norm " + std::to_string(n));

    AnglePair out;
    const double z = std::clamp(q.z(), -1.0, 1.0);
    out.elevation = std::acos(z);
    if (q.x() == 0.0 && q.y() == 0.0)
        out.azimuth = 0.0;
    else
        out.azimuth = wrap_azimuth(std::atan2(q.y(), q.x()));
    return out;
}

Vec3 kappa(const AnglePair &a)
{
    const double se = std::sin(a.elevation);
    return {std::cos(a.azimuth) * se, std::sin(a.azimuth) * se, std::cos(a.elevation)};
}

double wrap_azimuth(double az)
{
    double w = std::remainder(az, 2.0 * kPi); // [-pi, pi]
    if (w <= -kPi)
        w += 2.0 * kPi;
    return w;
}

AnglePair canonical(AnglePair a)
{
    double el = std::remainder(a.elevation, 2.0 * kPi); // [-pi, pi]
    double az = a.azimuth;
    if (el < 0.0)
    {
        el = -el;
        az += kPi;
    }
    return {wrap_azimuth(az), el};
}

double angle_error(const AnglePair &estimate, const AnglePair &truth)
{
    const double daz = wrap_azimuth(estimate.azimuth - truth.azimuth);
    const double del = estimate.elevation - truth.elevation;
    return std::hypot(daz, del);
}

} // namespace hrisloc
