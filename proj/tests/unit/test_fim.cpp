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

#include "hrisloc/errors.hpp"
#include "hrisloc/fim.hpp"
#include "hrisloc/random.hpp"

using namespace hrisloc;
using Catch::Approx;

namespace {

struct Fixture
{
    ScenarioFile file;
    Scenario s;
    RadioConfig cfg;
    CodebookSchedule sched;
    ChannelParams p;

    explicit Fixture(std::uint64_t seed = 1, const ScenarioFile &f = {}) : file(f)
    {
        s = f.scenario();
        cfg = f.radio();
        sched = build_schedule(cfg, derive_seed(seed, {0x5c4e}));
        p = channel_params_from_scenario(s, cfg, f.gains(), derive_seed(seed, {0x9a15}));
    }
};

double min_eig(const MatX &m)
{
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

template <class F> VecX five_point(const F &f, double h)
{
    return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

double peb(const MatX &c, int off) { return std::sqrt(c.block(off, off, 3, 3).trace()); }

} // namespace

TEST_CASE("channel FIM scales linearly with transmit power")
{
    Fixture fx;
    const MatX j1 = channel_fim(fx.cfg, fx.sched, fx.p);
    RadioConfig cfg2 = fx.cfg;
    cfg2.p_b *= 2.0;
    const MatX j2 = channel_fim(cfg2, fx.sched, fx.p);
    CHECK((j2 - 2.0 * j1).norm() / j1.norm() < 1e-13);
    CHECK((j1 - j1.transpose()).norm() == 0.0);
    CHECK(min_eig(j1) > 0.0);

    RadioConfig quiet = fx.cfg;
    quiet.noise_psd = 0.0;
    CHECK_THROWS_AS(channel_fim(quiet, fx.sched, fx.p), Error);
}

TEST_CASE("mean derivatives: structural zeros")
{
    Fixture fx;
    const auto d = mean_derivatives(fx.cfg, fx.sched, fx.p);
    REQUIRE(d.size() == kChannelDim);
    CHECK(d[idx::tau_br].d_u.norm() == 0.0);
    CHECK(d[idx::tau_bu].d_r.norm() == 0.0);
    CHECK(d[idx::tau_bru].d_r.norm() == 0.0);
    CHECK(d[idx::theta_bu].d_r.norm() == 0.0);
    CHECK(d[idx::theta_bu + 1].d_r.norm() == 0.0);
    CHECK(d[idx::theta_ru].d_r.norm() == 0.0);
    CHECK(d[idx::g_bu].d_r.norm() == 0.0);
    CHECK(d[idx::g_bu + 1].d_r.norm() == 0.0);
    CHECK(d[idx::g_bru].d_r.norm() == 0.0);
}

TEST_CASE("mean derivatives match finite differences")
{
    ScenarioFile f;
    f.K = 32;
    f.T = 20;
    Fixture fx(5, f);
    const auto d = mean_derivatives(fx.cfg, fx.sched, fx.p);
    const VecX z0 = channel_vector(fx.p);
    for (int i = 0; i < kChannelDim; ++i)
    {
        const double h = i <= idx::tau_bru ? 1e-11 : (i < kEtaDim ? 1e-5 : 1e-2 * std::abs(fx.p.g_bru));
        const auto mean = [&](double step) {
            VecX z = z0;
            z(i) += step;
            const ObservationSet o = noiseless_observations(fx.cfg, fx.sched, with_channel_vector(fx.p, z));
            VecX v(4 * o.y_r.size());
            const Eigen::Map<const CVec> r(o.y_r.data(), o.y_r.size()), u(o.y_u.data(), o.y_u.size());
            v << r.real(), r.imag(), u.real(), u.imag();
            return v;
        };
        VecX a(4 * d[i].d_r.size());
        const Eigen::Map<const CVec> r(d[i].d_r.data(), d[i].d_r.size()), u(d[i].d_u.data(), d[i].d_u.size());
        a << r.real(), r.imag(), u.real(), u.imag();
        const VecX fd = five_point(mean, h);
        INFO("parameter " << i);
        CHECK((a - fd).cwiseAbs().maxCoeff() <= 1e-6 * a.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("channel vector round trip")
{
    Fixture fx;
    const VecX z = channel_vector(fx.p);
    REQUIRE(z.size() == kChannelDim);
    CHECK(z(idx::tau_bu) == fx.p.tau_bu);
    CHECK(z(idx::phi_rb + 1) == fx.p.phi_rb.elevation);
    CHECK(z(idx::g_bru + 1) == fx.p.g_bru.imag());
    CHECK((channel_vector(with_channel_vector(fx.p, z)) - z).norm() == 0.0);
}

TEST_CASE("efim_channel")
{
    MatX j = MatX::Zero(kChannelDim, kChannelDim);
    MatX lead = MatX::Random(kEtaDim, kEtaDim);
    lead = lead * lead.transpose() + MatX::Identity(kEtaDim, kEtaDim);
    j.topLeftCorner(kEtaDim, kEtaDim) = lead;
    j.bottomRightCorner(6, 6).setIdentity();
    CHECK((efim_channel(j) - lead).norm() / lead.norm() < 1e-12);

    Fixture fx;
    const MatX jf = channel_fim(fx.cfg, fx.sched, fx.p);
    const MatX je = efim_channel(jf);
    const MatX loss = jf.topLeftCorner(kEtaDim, kEtaDim) - je;
    // PSD ordering, checked after equilibration.
    const VecX dscale = jf.diagonal().head(kEtaDim).cwiseSqrt().cwiseInverse();
    CHECK(min_eig(dscale.asDiagonal() * loss * dscale.asDiagonal()) > -1e-9);

    MatX singular = jf;
    singular.row(3).setZero();
    singular.col(3).setZero();
    try
    {
        efim_channel(singular);
        FAIL("expected SingularFIM");
    }
    catch (const SingularMatrixError &e)
    {
        CHECK(e.kind() == ErrorKind::SingularFIM);
        CHECK(std::isinf(e.condition()));
    }
}

TEST_CASE("jacobian_T structure")
{
    Fixture fx;
    const MatX t = jacobian_T(fx.s);
    REQUIRE(t.rows() == kEtaDim);
    REQUIRE(t.cols() == kStateDim);
    CHECK(t(idx::tau_br, idx::b_r) == 1.0);
    CHECK(t(idx::tau_bu, idx::b_u) == 1.0);
    CHECK(t(idx::tau_bru, idx::b_u) == 1.0);
    CHECK(t.block(idx::tau_bu, idx::p_r, 1, 3).norm() == 0.0);
    CHECK(t.block(idx::tau_br, idx::p_u, 1, 3).norm() == 0.0);
    CHECK(t.block(idx::theta_br, idx::rot, 4, 9).norm() == 0.0);
    CHECK(t(idx::tau_br, idx::p_r) == Approx(2.0 / std::sqrt(157.0) / kSpeedOfLight).epsilon(1e-14));

    Scenario bad = fx.s;
    bad.p_r = bad.p_b;
    CHECK_THROWS_AS(jacobian_T(bad), Error);
}

TEST_CASE("state_fim")
{
    Fixture fx;
    const MatX je = efim_channel(channel_fim(fx.cfg, fx.sched, fx.p));
    CHECK(state_fim(je, MatX::Zero(kEtaDim, kStateDim)).norm() == 0.0);
    const MatX js = state_fim(je, jacobian_T(fx.s));
    CHECK((js - js.transpose()).norm() <= 1e-12 * js.norm());
    Eigen::FullPivLU<MatX> lu(js);
    lu.setThreshold(1e-10);
    CHECK(lu.rank() <= kEtaDim);
}

TEST_CASE("constraint basis is tangent to the orthogonality constraint")
{
    const Rotation r = rotation_from_angles({0.3, -0.2, 1.1});
    const MatX phi = constraint_basis(r);
    REQUIRE(phi.rows() == kStateDim);
    REQUIRE(phi.cols() == 11);
    CHECK((phi.topLeftCorner(8, 8) - MatX::Identity(8, 8)).norm() == 0.0);
    CHECK(phi.topRightCorner(8, 3).norm() == 0.0);
    CHECK(phi.bottomLeftCorner(9, 8).norm() == 0.0);

    // G = d h / d zeta_s for h = (r_i^T r_j - delta_ij), i <= j.
    MatX g = MatX::Zero(6, kStateDim);
    int row = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j, ++row)
        {
            g.block(row, idx::rot + 3 * i, 1, 3) += r.column(j).transpose();
            g.block(row, idx::rot + 3 * j, 1, 3) += r.column(i).transpose();
        }
    CHECK((g * phi).norm() <= 1e-10);
    // Columns of the rotation block are orthonormal.
    const MatX p0 = phi.bottomRightCorner(9, 3);
    CHECK((p0.transpose() * p0 - MatX::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("constrained CRB")
{
    Fixture fx;
    const MatX je = efim_channel(channel_fim(fx.cfg, fx.sched, fx.p));
    const MatX js = state_fim(je, jacobian_T(fx.s));
    const MatX c = constrained_crb(js, fx.s.rotation());
    CHECK((c - c.transpose()).norm() == 0.0);
    const VecX dscale = c.diagonal().cwiseSqrt().cwiseInverse();
    CHECK(min_eig(dscale.asDiagonal() * c * dscale.asDiagonal()) > -1e-10);

    SECTION("knowledge only adds information")
    {
        const MatX c2 = constrained_crb(js, fx.s.rotation(), knowledge_for(KnowledgeCase::C2));
        CHECK(peb(c2, idx::p_r) <= peb(c, idx::p_r));
        CHECK(peb(c2, idx::p_u) == 0.0);
        CHECK(c2.bottomRightCorner(9, 9).norm() == 0.0);
        const Knowledge k5 = knowledge_for(KnowledgeCase::C5);
        CHECK(k5.p_r);
        CHECK(k5.rot);
        CHECK_FALSE(k5.p_u);
    }

    SECTION("unknown rotation agrees with an Euler-angle chart")
    {
        // CRB for (p_R, p_U, b_R, b_U, alpha, beta, gamma); the positional
        // bound does not depend on the chart used for the rotation.
        const auto eta = [&](const VecX &x) {
            ScenarioFile f = fx.file;
            f.p_r = {x(0), x(1), x(2)};
            f.p_u = {x(3), x(4), x(5)};
            f.b_r = x(6);
            f.b_u = x(7);
            f.alpha_deg = rad2deg(x(8));
            f.beta_deg = rad2deg(x(9));
            f.gamma_deg = rad2deg(x(10));
            return VecX(channel_vector(channel_params_from_scenario(f.scenario(), fx.cfg, {}, 1)).head(kEtaDim));
        };
        VecX x0(11);
        x0 << 2, 12, 3, 5, 2, 1, fx.s.b_r, fx.s.b_u, fx.s.rot.alpha, fx.s.rot.beta, fx.s.rot.gamma;
        MatX t(kEtaDim, 11);
        for (int i = 0; i < 11; ++i)
        {
            const auto col = [&](double step) {
                VecX x = x0;
                x(i) += step;
                VecX e = eta(x) - eta(x0);
                for (int k : {3, 5, 7, 9})
                    e(k) = wrap_azimuth(e(k));
                return e;
            };
            t.col(i) = five_point(col, (i == 6 || i == 7) ? 1e-10 : 1e-4);
        }
        const MatX euler = (t.transpose() * je * t).inverse();
        CHECK(peb(c, idx::p_r) == Approx(peb(euler, 0)).epsilon(1e-5));
        CHECK(peb(c, idx::p_u) == Approx(peb(euler, 3)).epsilon(1e-5));
    }

    SECTION("known rotation agrees with a whitened QR solve")
    {
        const MatX c3 = constrained_crb(js, fx.s.rotation(), knowledge_for(KnowledgeCase::C3));
        Eigen::LLT<MatX> llt(je);
        const MatX a = MatX(llt.matrixU()) * jacobian_T(fx.s).leftCols(8);
        Eigen::ColPivHouseholderQR<MatX> qr(a);
        const MatX r = qr.matrixR().topLeftCorner(8, 8).triangularView<Eigen::Upper>();
        const MatX ri = r.inverse();
        const MatX ref = qr.colsPermutation() * (ri * ri.transpose()) * qr.colsPermutation().transpose();
        CHECK(peb(c3, idx::p_r) == Approx(peb(ref, 0)).epsilon(1e-7));
        CHECK(peb(c3, idx::p_u) == Approx(peb(ref, 3)).epsilon(1e-7));
        CHECK(c3.bottomRightCorner(9, 9).norm() == 0.0);
    }

    CHECK_THROWS_AS(constrained_crb(MatX::Zero(17, 17), fx.s.rotation()), Error);
    CHECK_THROWS_AS(constrained_crb(MatX::Identity(5, 5), fx.s.rotation()), Error);
}

TEST_CASE("extract_bounds")
{
    const BoundReport b = extract_bounds(MatX::Identity(kStateDim, kStateDim), MatX::Identity(kEtaDim, kEtaDim));
    CHECK(b.peb_r == Approx(std::sqrt(3.0)));
    CHECK(b.peb_u == Approx(std::sqrt(3.0)));
    CHECK(b.ceb_r == 1.0);
    CHECK(b.oeb == 3.0);
    CHECK(b.teb_br == kSpeedOfLight);
    CHECK(b.adeb_ru == Approx(std::sqrt(2.0)));

    Fixture fx;
    const BoundReport r = compute_bounds(fx.s, fx.cfg, fx.sched, fx.p);
    for (double v : r.values())
        CHECK(v >= 0.0);
}

TEST_CASE("bounds at the default operating point")
{
    Fixture fx;
    const BoundReport b = compute_bounds(fx.s, fx.cfg, fx.sched, fx.p);
    // Frozen from this implementation's free-space gain model and seed 1.
    CHECK(b.teb_br == Approx(9.0042211606537102e-06).epsilon(1e-8));
    CHECK(b.teb_bu == Approx(1.8345583802979092e-05).epsilon(1e-8));
    CHECK(b.peb_r == Approx(0.031041705598352655).epsilon(1e-6));
    CHECK(b.peb_u == Approx(0.017153929672883855).epsilon(1e-6));
    CHECK(b.oeb == Approx(0.0027700551060286251).epsilon(1e-6));
}

TEST_CASE("bounds with gains calibrated to the reference TOA bound")
{
    // Scale |g_BR| so that TEB_BR equals the reference 1.62331309040893e-05 m;
    // the orientation bound then lands near the reference 3.32e-3.
    Fixture fx;
    const BoundReport b0 = compute_bounds(fx.s, fx.cfg, fx.sched, fx.p);
    ChannelParams p = fx.p;
    const double scale = b0.teb_br / 1.62331309040893e-05;
    p.g_br *= scale;
    p.g_bru *= scale;
    const BoundReport b = compute_bounds(fx.s, fx.cfg, fx.sched, p);
    CHECK(b.teb_br == Approx(1.62331309040893e-05).epsilon(1e-9));
    CHECK(b.oeb / 0.00332323171735307 > 0.5);
    CHECK(b.oeb / 0.00332323171735307 < 2.0);
}

TEST_CASE("every bound scales as the inverse square root of power")
{
    Fixture fx;
    const BoundReport a = compute_bounds(fx.s, fx.cfg, fx.sched, fx.p);
    RadioConfig cfg = fx.cfg;
    cfg.p_b *= 10.0;
    const BoundReport b = compute_bounds(fx.s, cfg, fx.sched, fx.p);
    for (int i = 0; i < BoundReport::kCount; ++i)
    {
        INFO(BoundReport::names()[i]);
        CHECK(b.values()[i] * std::sqrt(10.0) == Approx(a.values()[i]).epsilon(1e-9));
    }
}

TEST_CASE("invert_spd")
{
    MatX m(2, 2);
    m << 4, 1, 1, 3;
    CHECK((invert_spd(m, ErrorKind::SingularFIM) * m - MatX::Identity(2, 2)).norm() < 1e-14);
    MatX s(2, 2);
    s << 1, 1, 1, 1;
    try
    {
        invert_spd(s, ErrorKind::SingularReducedFIM);
        FAIL("expected singular");
    }
    catch (const SingularMatrixError &e)
    {
        CHECK(e.kind() == ErrorKind::SingularReducedFIM);
        CHECK(e.condition() > 1e12);
    }
}

TEST_CASE("bound CSV format")
{
    CHECK(bound_csv_header() == "scenario_id,P_B_dBm,rho,teb_br_m,teb_bu_m,teb_bru_m,adeb_br_rad,adeb_bu_rad,"
                                "adeb_ru_rad,aaeb_rb_rad,peb_r_m,peb_u_m,ceb_r_s,ceb_u_s,oeb");
    BoundReport b;
    b.teb_br = 0.1;
    b.oeb = 1.0 / 3.0;
    const std::string row = bound_csv_row("x", 30.0, 0.5, b);
    CHECK(row == "x,30,0.5,0.10000000000000001,0,0,0,0,0,0,0,0,0,0,0.33333333333333331");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
