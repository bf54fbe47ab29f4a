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

#include <Eigen/Dense>

namespace hrisloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Position = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 3.0e8; // m/s

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// z-y-x Euler angles: alpha about z, beta about y, gamma about x (radians).
struct RotationAngles
{
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

// Proper rotation matrix, columns r1, r2, r3. Construction checks
// R^T R = I and det R = 1 to the given tolerance.
class Rotation
{
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3 &m, double tol = 1e-12);

    const Mat3 &matrix() const { return m_; }
    Vec3 column(int i) const { return m_.col(i); }

    // [r1; r2; r3]
    Eigen::Matrix<double, 9, 1> stacked() const;

    static bool is_valid(const Mat3 &m, double tol = 1e-12);

private:
    Mat3 m_;
};

// Azimuth in (-pi, pi], elevation in [0, pi], measured from the local z axis.
struct AnglePair
{
    double azimuth = 0.0;
    double elevation = 0.0;
};

// R = R_alpha(z) R_beta(y) R_gamma(x) with the z factor written as
// [[cos, sin, 0], [-sin, cos, 0], [0, 0, 1]].
Rotation rotation_from_angles(const RotationAngles &angles);

// R^T (to - from) / |to - from|. Throws CoincidentPoints below 1e-9 m.
Vec3 direction_local(const Rotation &r, const Position &from, const Position &to);

// az = atan2(q2, q1), el = acos(q3); az = 0 at the poles. Throws NotUnit.
AnglePair angles_from_direction(const Vec3 &q);

// Unit vector [cos az sin el, sin az sin el, cos el].
Vec3 kappa(const AnglePair &angles);

// Wraps to (-pi, pi].
double wrap_azimuth(double az);

// Maps any (az, el) to the canonical ranges without changing kappa().
AnglePair canonical(AnglePair angles);

// Euclidean norm of (wrapped azimuth difference, elevation difference).
double angle_error(const AnglePair &estimate, const AnglePair &truth);

} // namespace hrisloc
