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
#include <filesystem>
#include <fstream>

#include "hrisloc/errors.hpp"
#include "hrisloc/estimator.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

using namespace hrisloc;
using Catch::Approx;

namespace {

struct Fixture
{
    Scenario s;
    RadioConfig cfg;
    CodebookSchedule sched;
    ChannelParams p;

    explicit Fixture(int K = 128, int T = 100)
    {
        ScenarioFile f;
        f.K = K;
        f.T = T;
        s = f.scenario();
        cfg = f.radio();
        sched = build_schedule(cfg, 3);
        p = channel_params_from_scenario(s, cfg, f.gains(), 4);
    }
};

double rel(const CMat &a, const CMat &b) { return (a - b).norm() / b.norm(); }

} // namespace

TEST_CASE("steering vectors")
{
    ArrayGeometry g{4, 4, 0.0025, 0.01};
    const CVec ones = steering(g, {kPi / 2, kPi / 2});
    CHECK((ones - CVec::Ones(16)).cwiseAbs().maxCoeff() < 1e-15);

    const CVec a = steering(g, {0.0, kPi / 2});
    // Element (row 1, column 0).
    CHECK(std::abs(a(4) - std::exp(cplx(0.0, -kPi / 2))) < 1e-15);
    CHECK(std::abs(a(1) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(a.cwiseAbs().minCoeff() == Approx(1.0));
}

TEST_CASE("steering_jet matches the steering vector")
{
    ArrayGeometry g{16, 16, 0.0025, 0.01};
    const AnglePair psi{0.7, 1.1};
    const SteeringJet j = steering_jet(g, psi);
    CHECK((j.a - steering(g, psi)).norm() == 0.0);
    const double h = 1e-6;
    const CVec d_az = (steering(g, {psi.azimuth + h, psi.elevation}) - steering(g, {psi.azimuth - h, psi.elevation})) / (2 * h);
    CHECK((j.d_az - d_az).norm() / d_az.norm() < 1e-8);
}

TEST_CASE("delay steering")
{
    CHECK((delay_steering(0.0, 16, 120e3) - CVec::Ones(16)).norm() == 0.0);
    const int K = 16;
    const CVec d = delay_steering(1.0 / (K * 120e3), K, 120e3);
    for (int k = 0; k < K; ++k)
        CHECK(std::abs(d(k) - std::polar(1.0, -2.0 * kPi * k / K)) < 1e-14);
}

TEST_CASE("channel parameters of the default geometry")
{
    Fixture fx;
    const double c = kSpeedOfLight;
    const double expected = (std::sqrt(157.0) + std::sqrt(113.0) - std::sqrt(30.0)) / c;
    CHECK((fx.p.tau_bru - fx.p.tau_bu) == Approx(expected).epsilon(1e-12));
    CHECK(expected == Approx(5.8942947746e-8).epsilon(1e-10));
    CHECK(fx.p.tau_br == Approx(std::sqrt(157.0) / c + 10e-9).epsilon(1e-14));
    CHECK(std::abs(fx.p.g_br) == Approx(0.01 / (4 * kPi * std::sqrt(157.0))).epsilon(1e-14));

    Scenario s = fx.s;
    s.rot = {};
    const ChannelParams q = channel_params_from_scenario(s, fx.cfg, {}, 1);
    const AnglePair ref = angles_from_direction((s.p_b - s.p_r).normalized());
    CHECK(q.phi_rb.azimuth == Approx(ref.azimuth).epsilon(1e-14));
    CHECK(q.phi_rb.elevation == Approx(ref.elevation).epsilon(1e-14));

    s.p_u = s.p_r;
    try
    {
        channel_params_from_scenario(s, fx.cfg, {}, 1);
        FAIL("expected DegenerateGeometry");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::DegenerateGeometry);
    }
}

TEST_CASE("codebook schedule")
{
    Fixture fx;
    CHECK(fx.sched.T() == 100);
    CHECK((fx.sched.c.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((fx.sched.gamma.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    for (int t = 0; t < 100; t += 2)
    {
        CHECK((fx.sched.gamma.col(t) + fx.sched.gamma.col(t + 1)).norm() == 0.0);
        CHECK((fx.sched.f.col(t) - fx.sched.f.col(t + 1)).norm() == 0.0);
        CHECK(fx.sched.f.col(t).norm() == Approx(1.0));
    }
    const CodebookSchedule again = build_schedule(fx.cfg, 3);
    CHECK(again.f == fx.sched.f);
    CHECK(again.c == fx.sched.c);
    CHECK(again.gamma == fx.sched.gamma);

    RadioConfig odd = fx.cfg;
    odd.T = 9;
    CHECK_THROWS_AS(build_schedule(odd, 1), Error);
}

TEST_CASE("noiseless observation structure")
{
    Fixture fx;
    const ObservationSet y = noiseless_observations(fx.cfg, fx.sched, fx.p);

    SECTION("no reflected component at rho = 1")
    {
        RadioConfig cfg = fx.cfg;
        cfg.rho = 1.0;
        ChannelParams direct = fx.p;
        direct.g_bru = 0.0;
        const ObservationSet a = noiseless_observations(cfg, fx.sched, fx.p);
        const ObservationSet b = noiseless_observations(cfg, fx.sched, direct);
        CHECK((a.y_u - b.y_u).norm() == 0.0);
    }

    SECTION("profile pairing separates the two UE paths")
    {
        ChannelParams only_bru = fx.p;
        only_bru.g_bu = 0.0;
        ChannelParams only_bu = fx.p;
        only_bu.g_bru = 0.0;
        const SeparatedPaths s1 = separate_paths(noiseless_observations(fx.cfg, fx.sched, only_bru).y_u);
        const SeparatedPaths s2 = separate_paths(noiseless_observations(fx.cfg, fx.sched, only_bu).y_u);
        const SeparatedPaths both = separate_paths(y.y_u);
        CHECK(s1.z_bu.norm() / s1.z_bru.norm() <= 1e-10);
        CHECK(s2.z_bru.norm() / s2.z_bu.norm() <= 1e-10);
        CHECK((both.z_bu - s2.z_bu).norm() / both.z_bu.norm() <= 1e-10);
    }

    SECTION("Y_R is separable in subcarrier and snapshot")
    {
        const CVec d = delay_steering(fx.p.tau_br, fx.cfg.K, fx.cfg.delta_f);
        const CVec row = (d.adjoint() * y.y_r).transpose() / d.squaredNorm();
        CHECK(rel(d * row.transpose(), y.y_r) <= 1e-10);
    }

    SECTION("sensed energy is proportional to rho")
    {
        RadioConfig a = fx.cfg, b = fx.cfg;
        a.rho = 0.25;
        b.rho = 0.5;
        const double ea = noiseless_observations(a, fx.sched, fx.p).y_r.squaredNorm();
        const double eb = noiseless_observations(b, fx.sched, fx.p).y_r.squaredNorm();
        CHECK(eb / ea == Approx(2.0).epsilon(1e-13));
    }

    SECTION("scatterers only reach the UE")
    {
        Scenario s = fx.s;
        const ScattererLists sc = place_scatterers(2, 2, 5);
        s.scatterers_bu = sc.bu;
        s.scatterers_bru = sc.bru;
        const ChannelParams ps = channel_params_from_scenario(s, fx.cfg, {}, 4);
        REQUIRE(ps.bsu.size() == 2);
        REQUIRE(ps.brsu.size() == 2);
        const ObservationSet ys = noiseless_observations(fx.cfg, fx.sched, ps);
        CHECK((ys.y_r - y.y_r).norm() == 0.0);
        CHECK((ys.y_u - y.y_u).norm() > 0.0);
    }
}

TEST_CASE("Y_R entry matches an element-wise sum")
{
    ScenarioFile f;
    f.K = 1;
    f.T = 2;
    f.n_fft = 16;
    const Scenario s = f.scenario();
    const RadioConfig cfg = f.radio();
    const CodebookSchedule sched = build_schedule(cfg, 8);
    const ChannelParams p = channel_params_from_scenario(s, cfg, f.gains(), 2);
    const ObservationSet y = noiseless_observations(cfg, sched, p);

    const auto element = [&cfg](const AnglePair &a, int r, int c) {
        const double ph = 2.0 * kPi * cfg.element_spacing / cfg.lambda *
                          (r * std::sin(a.elevation) * std::cos(a.azimuth) + c * std::cos(a.elevation));
        return std::polar(1.0, -ph);
    };
    for (int t = 0; t < 2; ++t)
    {
        cplx bs(0.0, 0.0), ris(0.0, 0.0);
        for (int r = 0; r < cfg.bs_rows; ++r)
            for (int c = 0; c < cfg.bs_cols; ++c)
                bs += element(p.theta_br, r, c) * sched.f(r * cfg.bs_cols + c, t);
        for (int r = 0; r < cfg.ris_rows; ++r)
            for (int c = 0; c < cfg.ris_cols; ++c)
                ris += sched.c(r * cfg.ris_cols + c, t) * element(p.phi_rb, r, c);
        const cplx expected = p.g_br * std::sqrt(cfg.rho * cfg.p_b) * ris * bs;
        CHECK(std::abs(y.y_r(0, t) - expected) <= 1e-12 * std::abs(expected));
    }
}

TEST_CASE("synthesize")
{
    Fixture fx;
    const ObservationSet a = synthesize(fx.cfg, fx.sched, fx.p, 17);
    const ObservationSet b = synthesize(fx.cfg, fx.sched, fx.p, 17);
    CHECK(a.y_r == b.y_r);
    CHECK(a.y_u == b.y_u);

    const ObservationSet clean = noiseless_observations(fx.cfg, fx.sched, fx.p);
    const double sigma2 = noise_variance(fx.cfg);
    const double n = static_cast<double>(clean.y_r.size());
    const double er = (a.y_r - clean.y_r).squaredNorm() / n;
    const double eu = (a.y_u - clean.y_u).squaredNorm() / n;
    // 12800 samples: the sample mean is within 5 standard errors of sigma^2.
    CHECK(std::abs(er / sigma2 - 1.0) < 5.0 / std::sqrt(n));
    CHECK(std::abs(eu / sigma2 - 1.0) < 5.0 / std::sqrt(n));

    RadioConfig quiet = fx.cfg;
    quiet.noise_psd = 0.0;
    CHECK(synthesize(quiet, fx.sched, fx.p, 1).y_u == clean.y_u);
}

TEST_CASE("observation dump round trip")
{
    Fixture fx(32, 10);
    const ObservationSet a = synthesize(fx.cfg, fx.sched, fx.p, 2);
    const auto path = std::filesystem::temp_directory_path() / "hrisloc_obs_roundtrip.bin";
    write_observations(a, path.string());
    CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 2 * 32 * 10 * 16);
    const ObservationSet b = read_observations(path.string());
    CHECK(b.y_r == a.y_r);
    CHECK(b.y_u == a.y_u);

    {
        std::ofstream bad(path, std::ios::binary);
        bad << "NOTMAGIC";
    }
    CHECK_THROWS_AS(read_observations(path.string()), Error);
    std::filesystem::remove(path);
}
