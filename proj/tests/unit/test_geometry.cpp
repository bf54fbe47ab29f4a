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
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hrisloc/errors.hpp"
#include "hrisloc/geometry.hpp"

using namespace hrisloc;
using Catch::Approx;

TEST_CASE("rotation_from_angles: zero angles give the identity")
{
    const Rotation r = rotation_from_angles({0.0, 0.0, 0.0});
    CHECK((r.matrix() - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("rotation_from_angles: leading entry is cos(alpha) cos(beta)")
{
    const double a = deg2rad(20.0), b = deg2rad(10.0), g = deg2rad(15.0);
    const Rotation r = rotation_from_angles({a, b, g});
    CHECK(r.matrix()(0, 0) == Approx(0.92541657839832336).epsilon(1e-14));
    CHECK(r.matrix()(0, 0) == Approx(std::cos(a) * std::cos(b)).epsilon(1e-15));

    // Independent product of the three elementary factors.
    Mat3 rz, ry, rx;
    rz << std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a), 0, 0, 0, 1;
    ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
    rx << 1, 0, 0, 0, std::cos(g), -std::sin(g), 0, std::sin(g), std::cos(g);
    CHECK((r.matrix() - rz * ry * rx).norm() < 1e-15);
}

TEST_CASE("rotation_from_angles: orthonormal with unit determinant for random angles")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 1000; ++i)
    {
        const Mat3 m = rotation_from_angles({u(rng), u(rng), u(rng)}).matrix();
        REQUIRE((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(std::abs(m.determinant() - 1.0) <= 1e-12);
    }
}

TEST_CASE("Rotation rejects non-orthogonal matrices")
{
    Mat3 m = Mat3::Identity();
    m(0, 1) = 1e-3;
    CHECK_THROWS_AS(Rotation(m), Error);
    CHECK_FALSE(Rotation::is_valid(-Mat3::Identity()));
}

TEST_CASE("direction_local")
{
    const Rotation id;
    const Vec3 q = direction_local(id, Position::Zero(), Position(1, 0, 0));
    CHECK((q - Vec3(1, 0, 0)).norm() == 0.0);

    const Vec3 q_rb = direction_local(id, Position(2, 12, 3), Position::Zero());
    CHECK((q_rb - Vec3(-2, -12, -3) / std::sqrt(157.0)).norm() < 1e-15);

    try
    {
        direction_local(id, Position(1, 2, 3), Position(1, 2, 3));
        FAIL("expected CoincidentPoints");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::CoincidentPoints);
    }
}

TEST_CASE("angles_from_direction")
{
    const AnglePair pole = angles_from_direction(Vec3(0, 0, 1));
    CHECK(pole.azimuth == 0.0);
    CHECK(pole.elevation == 0.0);

    const AnglePair bu = angles_from_direction(Vec3(5, 2, 1) / std::sqrt(30.0));
    CHECK(bu.azimuth == Approx(0.38050637711236490).epsilon(1e-13));
    CHECK(bu.elevation == Approx(1.3871923165159781).epsilon(1e-13));

    const AnglePair br = angles_from_direction(Vec3(2, 12, 3) / std::sqrt(157.0));
    CHECK(br.azimuth == Approx(1.4056476493802699).epsilon(1e-13));
    CHECK(br.elevation == Approx(1.3290216467314362).epsilon(1e-13));

    try
    {
        angles_from_direction(Vec3(1, 1, 0));
        FAIL("expected NotUnit");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::NotUnit);
    }
}

TEST_CASE("kappa")
{
    CHECK((kappa({0.0, kPi / 2}) - Vec3(1, 0, 0)).norm() < 1e-16);
    CHECK((kappa({kPi / 2, kPi / 2}) - Vec3(0, 1, 0)).norm() < 1e-16);
}

TEST_CASE("kappa inverts angles_from_direction away from the poles")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int i = 0; i < 1000; ++i)
    {
        Vec3 q(n(rng), n(rng), n(rng));
        q.normalize();
        if (std::abs(q.z()) > 1.0 - 1e-6)
            continue;
        REQUIRE((kappa(angles_from_direction(q)) - q).norm() <= 1e-12);
    }
}

TEST_CASE("wrap_azimuth and canonical")
{
    CHECK(wrap_azimuth(kPi) == Approx(kPi));
    CHECK(wrap_azimuth(-kPi) == Approx(kPi));
    CHECK(wrap_azimuth(3 * kPi / 2) == Approx(-kPi / 2));
    CHECK(wrap_azimuth(0.25) == 0.25);

    const AnglePair c = canonical({0.3, -0.4});
    CHECK(c.elevation == Approx(0.4));
    CHECK((kappa(c) - kappa({0.3, -0.4})).norm() < 1e-15);

    CHECK(angle_error({kPi - 1e-3, 1.0}, {-kPi + 1e-3, 1.0}) == Approx(2e-3).epsilon(1e-9));
}
