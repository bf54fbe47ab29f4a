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
#include "hrisloc/fim.hpp"

#include <cmath>
#include <cstdio>

namespace hrisloc {

namespace {

using Row3 = Eigen::RowVector3d;

// Rows d(az)/dx and d(el)/dx of a unit direction q given dq/dx.
Eigen::Matrix<double, 2, Eigen::Dynamic> angle_rows(const Vec3 &q, const MatX &dq)
{
    const double rho2 = q.x() * q.x() + q.y() * q.y();
    if (rho2 < 1e-24)
        throw Error(ErrorKind::DegenerateGeometry, "direction along the array normal axis");
    Eigen::Matrix<double, 2, Eigen::Dynamic> out(2, dq.cols());
    out.row(0) = (-q.y() * dq.row(0) + q.x() * dq.row(1)) / rho2;
    out.row(1) = -dq.row(2) / std::sqrt(rho2);
    return out;
}

Mat3 unit_jacobian(const Vec3 &u, double dist) { return (Mat3::Identity() - u * u.transpose()) / dist; }

} // namespace

VecX channel_vector(const ChannelParams &p)
{
    VecX z(kChannelDim);
    z << p.tau_br, p.tau_bu, p.tau_bru, p.theta_br.azimuth, p.theta_br.elevation, p.theta_bu.azimuth,
        p.theta_bu.elevation, p.theta_ru.azimuth, p.theta_ru.elevation, p.phi_rb.azimuth, p.phi_rb.elevation,
        p.g_br.real(), p.g_br.imag(), p.g_bu.real(), p.g_bu.imag(), p.g_bru.real(), p.g_bru.imag();
    return z;
}

ChannelParams with_channel_vector(ChannelParams p, const VecX &z)
{
    if (z.size() != kChannelDim)
        throw Error(ErrorKind::DimensionMismatch, "channel vector must have 17 entries");
    p.tau_br = z(0);
    p.tau_bu = z(1);
    p.tau_bru = z(2);
    p.theta_br = {z(3), z(4)};
    p.theta_bu = {z(5), z(6)};
    p.theta_ru = {z(7), z(8)};
    p.phi_rb = {z(9), z(10)};
    p.g_br = {z(11), z(12)};
    p.g_bu = {z(13), z(14)};
    p.g_bru = {z(15), z(16)};
    return p;
}

VecX state_vector(const Scenario &s)
{
    VecX v(kStateDim);
    v << s.p_r, s.p_u, s.b_r, s.b_u, s.rotation().stacked();
    return v;
}

std::vector<MeanDerivative> mean_derivatives(const RadioConfig &cfg, const CodebookSchedule &sched,
                                             const ChannelParams &p)
{
    const ArrayGeometry gb = bs_array(cfg), gr = ris_array(cfg);
    if (sched.f.rows() != gb.size() || sched.c.rows() != gr.size() || sched.T() != cfg.T)
        throw Error(ErrorKind::DimensionMismatch, "schedule does not match configuration");

    const int K = cfg.K, T = cfg.T;
    const SteeringJet br = steering_jet(gb, p.theta_br);
    const SteeringJet bu = steering_jet(gb, p.theta_bu);
    const SteeringJet ru = steering_jet(gr, p.theta_ru);
    const SteeringJet rb = steering_jet(gr, p.phi_rb);

    const CVec d_br = delay_steering(p.tau_br, K, cfg.delta_f);
    const CVec d_bu = delay_steering(p.tau_bu, K, cfg.delta_f);
    const CVec d_bru = delay_steering(p.tau_bru, K, cfg.delta_f);
    CVec kd(K);
    for (int k = 0; k < K; ++k)
        kd(k) = cplx(0.0, -2.0 * kPi * k * cfg.delta_f);

    const CMat Ft = sched.f.transpose(), Ct = sched.c.transpose(), Gt = sched.gamma.transpose();
    const CVec bf = Ft * br.a;
    const CVec cb = Ct * rb.a;
    const CVec s_r = cb.cwiseProduct(bf);
    const CVec s_bu = Ft * bu.a;
    const CVec refl = Gt * ru.a.cwiseProduct(rb.a);
    const CVec s_bru = refl.cwiseProduct(bf);

    const double sr = std::sqrt(cfg.rho * cfg.p_b);
    const double sp = std::sqrt(cfg.p_b);
    const double su = std::sqrt((1.0 - cfg.rho) * cfg.p_b);
    const cplx a_r = p.g_br * sr, a_bu = p.g_bu * sp, a_bru = p.g_bru * su;

    const CMat zero = CMat::Zero(K, T);
    std::vector<MeanDerivative> out(kChannelDim, MeanDerivative{zero, zero});
    auto outer = [](const CVec &u, const CVec &v) -> CMat { return u * v.transpose(); };

    out[idx::tau_br].d_r = outer(a_r * kd.cwiseProduct(d_br), s_r);
    out[idx::tau_bu].d_u = outer(a_bu * kd.cwiseProduct(d_bu), s_bu);
    out[idx::tau_bru].d_u = outer(a_bru * kd.cwiseProduct(d_bru), s_bru);

    const CVec *dbr[2] = {&br.d_az, &br.d_el};
    const CVec *dbu[2] = {&bu.d_az, &bu.d_el};
    const CVec *dru[2] = {&ru.d_az, &ru.d_el};
    const CVec *drb[2] = {&rb.d_az, &rb.d_el};
    for (int a = 0; a < 2; ++a)
    {
        const CVec bf_d = Ft * *dbr[a];
        out[idx::theta_br + a].d_r = outer(a_r * d_br, cb.cwiseProduct(bf_d));
        out[idx::theta_br + a].d_u = outer(a_bru * d_bru, refl.cwiseProduct(bf_d));

        out[idx::theta_bu + a].d_u = outer(a_bu * d_bu, Ft * *dbu[a]);

        out[idx::theta_ru + a].d_u = outer(a_bru * d_bru, (Gt * dru[a]->cwiseProduct(rb.a)).cwiseProduct(bf));

        out[idx::phi_rb + a].d_r = outer(a_r * d_br, (Ct * *drb[a]).cwiseProduct(bf));
        out[idx::phi_rb + a].d_u = outer(a_bru * d_bru, (Gt * ru.a.cwiseProduct(*drb[a])).cwiseProduct(bf));
    }

    const cplx e[2] = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
    for (int a = 0; a < 2; ++a)
    {
        out[idx::g_br + a].d_r = outer((e[a] * sr) * d_br, s_r);
        out[idx::g_bu + a].d_u = outer((e[a] * sp) * d_bu, s_bu);
        out[idx::g_bru + a].d_u = outer((e[a] * su) * d_bru, s_bru);
    }
    return out;
}

MatX unit_snr_channel_fim(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params)
{
    RadioConfig unit = cfg;
    unit.p_b = 1.0;
    const auto der = mean_derivatives(unit, sched, params);
    const Eigen::Index n = static_cast<Eigen::Index>(cfg.K) * cfg.T;
    CMat D(2 * n, kChannelDim);
    for (int i = 0; i < kChannelDim; ++i)
    {
        D.col(i).head(n) = der[i].d_r.reshaped();
        D.col(i).tail(n) = der[i].d_u.reshaped();
    }
    MatX j = 2.0 * (D.adjoint() * D).real();
    return 0.5 * (j + j.transpose());
}

MatX channel_fim(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params)
{
    const double sigma2 = noise_variance(cfg);
    if (!(sigma2 > 0.0))
        throw Error(ErrorKind::InvalidConfig, "noise variance must be positive for the FIM");
    return (cfg.p_b / sigma2) * unit_snr_channel_fim(cfg, sched, params);
}

MatX invert_spd(const MatX &m, ErrorKind kind)
{
    const Eigen::Index n = m.rows();
    if (m.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
    VecX scale(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (!(m(i, i) > 0.0))
            throw SingularMatrixError(kind, "non-positive diagonal entry " + std::to_string(i),
                                      std::numeric_limits<double>::infinity());
        scale(i) = 1.0 / std::sqrt(m(i, i));
    }
    MatX a = scale.asDiagonal() * m * scale.asDiagonal();
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatX> es(a);
    const VecX &ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    const double lmin = ev.minCoeff();
    if (!(lmax > 0.0) || lmin < 1e-12 * lmax)
    {
        const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
        throw SingularMatrixError(kind, "matrix is numerically singular", cond);
    }
    const MatX inv_a = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    MatX inv = scale.asDiagonal() * inv_a * scale.asDiagonal();
    return 0.5 * (inv + inv.transpose());
}

MatX efim_channel(const MatX &j)
{
    if (j.rows() != kChannelDim || j.cols() != kChannelDim)
        throw Error(ErrorKind::DimensionMismatch, "channel FIM must be 17 x 17");
    const MatX crb = invert_spd(j, ErrorKind::SingularFIM);
    return invert_spd(crb.topLeftCorner(kEtaDim, kEtaDim), ErrorKind::SingularFIM);
}

MatX jacobian_T(const Scenario &s)
{
    const Mat3 R = s.rotation().matrix();
    const Vec3 v_br = s.p_r - s.p_b, v_bu = s.p_u - s.p_b, v_ru = s.p_u - s.p_r;
    const double d_br = v_br.norm(), d_bu = v_bu.norm(), d_ru = v_ru.norm();
    if (d_br < 1e-9 || d_bu < 1e-9 || d_ru < 1e-9)
        throw Error(ErrorKind::DegenerateGeometry, "coincident nodes");
    const Vec3 u_br = v_br / d_br, u_bu = v_bu / d_bu, u_ru = v_ru / d_ru;
    const double c = kSpeedOfLight;

    MatX t = MatX::Zero(kEtaDim, kStateDim);

    t.block<1, 3>(idx::tau_br, idx::p_r) = u_br.transpose() / c;
    t(idx::tau_br, idx::b_r) = 1.0;

    t.block<1, 3>(idx::tau_bu, idx::p_u) = u_bu.transpose() / c;
    t(idx::tau_bu, idx::b_u) = 1.0;

    t.block<1, 3>(idx::tau_bru, idx::p_r) = (u_br - u_ru).transpose() / c;
    t.block<1, 3>(idx::tau_bru, idx::p_u) = u_ru.transpose() / c;
    t(idx::tau_bru, idx::b_u) = 1.0;

    // BS-side angles in the global frame.
    t.block(idx::theta_br, idx::p_r, 2, 3) = angle_rows(u_br, unit_jacobian(u_br, d_br));
    t.block(idx::theta_bu, idx::p_u, 2, 3) = angle_rows(u_bu, unit_jacobian(u_bu, d_bu));

    // HRIS-side angles: q = R^T w, so dq/dr_i has w^T in row i.
    auto hris_rows = [&](int row, const Vec3 &w, const Mat3 &dw_dp, int p_col, int sign) {
        const Vec3 q = R.transpose() * w;
        MatX dq = MatX::Zero(3, kStateDim);
        dq.block(0, p_col, 3, 3) = sign * R.transpose() * dw_dp;
        for (int i = 0; i < 3; ++i)
            dq.block(i, idx::rot + 3 * i, 1, 3) = w.transpose();
        return std::pair{row, angle_rows(q, dq)};
    };

    // theta_ru depends on p_R (sign -) and p_U (sign +).
    {
        const Mat3 jw = unit_jacobian(u_ru, d_ru);
        auto [row, rows] = hris_rows(idx::theta_ru, u_ru, jw, idx::p_u, +1);
        const Vec3 q = R.transpose() * u_ru;
        MatX dq_pr = MatX::Zero(3, kStateDim);
        dq_pr.block(0, idx::p_r, 3, 3) = -R.transpose() * jw;
        rows += angle_rows(q, dq_pr);
        t.block(row, 0, 2, kStateDim) = rows;
    }
    // phi_rb: w = (p_B - p_R) / d_BR depends on p_R only.
    {
        const Vec3 w = -u_br;
        auto [row, rows] = hris_rows(idx::phi_rb, w, unit_jacobian(w, d_br), idx::p_r, -1);
        t.block(row, 0, 2, kStateDim) = rows;
    }
    return t;
}

MatX state_fim(const MatX &j_eta, const MatX &t)
{
    if (j_eta.rows() != t.rows() || j_eta.cols() != t.rows())
        throw Error(ErrorKind::DimensionMismatch, "J_eta and T do not conform");
    MatX js = t.transpose() * j_eta * t;
    return 0.5 * (js + js.transpose());
}

MatX constraint_basis(const Rotation &r)
{
    const Vec3 r1 = r.column(0), r2 = r.column(1), r3 = r.column(2);
    MatX phi0 = MatX::Zero(9, 3);
    phi0.block<3, 1>(0, 0) = -r3;
    phi0.block<3, 1>(6, 0) = r1;
    phi0.block<3, 1>(3, 1) = -r3;
    phi0.block<3, 1>(6, 1) = r2;
    phi0.block<3, 1>(0, 2) = r2;
    phi0.block<3, 1>(3, 2) = -r1;

    MatX phi = MatX::Zero(kStateDim, 11);
    phi.topLeftCorner(8, 8).setIdentity();
    phi.bottomRightCorner(9, 3) = phi0 / std::sqrt(2.0);
    return phi;
}

Knowledge knowledge_for(KnowledgeCase c)
{
    switch (c)
    {
    case KnowledgeCase::C1:
        return {false, false, false};
    case KnowledgeCase::C2:
        return {false, true, true};
    case KnowledgeCase::C3:
        return {false, false, true};
    case KnowledgeCase::C4:
        return {false, true, false};
    case KnowledgeCase::C5:
        return {true, false, true};
    case KnowledgeCase::C6:
        return {true, false, false};
    }
    return {};
}

MatX constrained_crb(const MatX &j_s, const Rotation &r, const Knowledge &known)
{
    if (j_s.rows() != kStateDim || j_s.cols() != kStateDim)
        throw Error(ErrorKind::DimensionMismatch, "state FIM must be 17 x 17");

    std::vector<int> keep;
    for (int i = 0; i < kStateDim; ++i)
    {
        const bool is_known = (known.p_r && i >= idx::p_r && i < idx::p_r + 3) ||
                              (known.p_u && i >= idx::p_u && i < idx::p_u + 3) || (known.rot && i >= idx::rot);
        if (!is_known)
            keep.push_back(i);
    }
    const MatX phi_full = constraint_basis(r);
    std::vector<int> cols;
    for (int j = 0; j < phi_full.cols(); ++j)
    {
        bool nonzero = false;
        for (const int i : keep)
            nonzero = nonzero || phi_full(i, j) != 0.0;
        if (nonzero)
            cols.push_back(j);
    }

    const auto n = static_cast<Eigen::Index>(keep.size());
    const auto m = static_cast<Eigen::Index>(cols.size());
    MatX js(n, n), phi(n, m);
    for (Eigen::Index a = 0; a < n; ++a)
    {
        for (Eigen::Index b = 0; b < n; ++b)
            js(a, b) = j_s(keep[a], keep[b]);
        for (Eigen::Index b = 0; b < m; ++b)
            phi(a, b) = phi_full(keep[a], cols[b]);
    }

    const MatX reduced = phi.transpose() * js * phi;
    const MatX c_small = phi * invert_spd(reduced, ErrorKind::SingularReducedFIM) * phi.transpose();

    MatX c = MatX::Zero(kStateDim, kStateDim);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            c(keep[a], keep[b]) = c_small(a, b);
    return 0.5 * (c + c.transpose());
}

std::array<double, BoundReport::kCount> BoundReport::values() const
{
    return {teb_br, teb_bu, teb_bru, adeb_br, adeb_bu, adeb_ru, aaeb_rb, peb_r, peb_u, ceb_r, ceb_u, oeb};
}

const std::array<const char *, BoundReport::kCount> &BoundReport::names()
{
    static const std::array<const char *, kCount> n = {"teb_br_m",    "teb_bu_m",    "teb_bru_m", "adeb_br_rad",
                                                       "adeb_bu_rad", "adeb_ru_rad", "aaeb_rb_rad", "peb_r_m",
                                                       "peb_u_m",     "ceb_r_s",     "ceb_u_s",   "oeb"};
    return n;
}

BoundReport extract_bounds(const MatX &c, const MatX &j_eta)
{
    if (c.rows() != kStateDim || j_eta.rows() != kEtaDim)
        throw Error(ErrorKind::DimensionMismatch, "unexpected matrix sizes for bound extraction");
    const MatX crb_eta = invert_spd(j_eta, ErrorKind::SingularFIM);
    auto block = [](const MatX &m, int start, int len) {
        return std::sqrt(std::max(0.0, m.diagonal().segment(start, len).sum()));
    };

    BoundReport b;
    b.teb_br = kSpeedOfLight * block(crb_eta, idx::tau_br, 1);
    b.teb_bu = kSpeedOfLight * block(crb_eta, idx::tau_bu, 1);
    b.teb_bru = kSpeedOfLight * block(crb_eta, idx::tau_bru, 1);
    b.adeb_br = block(crb_eta, idx::theta_br, 2);
    b.adeb_bu = block(crb_eta, idx::theta_bu, 2);
    b.adeb_ru = block(crb_eta, idx::theta_ru, 2);
    b.aaeb_rb = block(crb_eta, idx::phi_rb, 2);
    b.peb_r = block(c, idx::p_r, 3);
    b.peb_u = block(c, idx::p_u, 3);
    b.ceb_r = block(c, idx::b_r, 1);
    b.ceb_u = block(c, idx::b_u, 1);
    b.oeb = block(c, idx::rot, 9);
    return b;
}

BoundReport scale_bounds(const BoundReport &b, double factor)
{
    BoundReport r = b;
    for (double *v : {&r.teb_br, &r.teb_bu, &r.teb_bru, &r.adeb_br, &r.adeb_bu, &r.adeb_ru, &r.aaeb_rb, &r.peb_r,
                      &r.peb_u, &r.ceb_r, &r.ceb_u, &r.oeb})
        *v *= factor;
    return r;
}

BoundReport compute_bounds(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                           const ChannelParams &params, const Knowledge &known)
{
    const double sigma2 = noise_variance(cfg);
    if (!(sigma2 > 0.0) || !(cfg.p_b > 0.0))
        throw Error(ErrorKind::InvalidConfig, "bounds need positive power and noise variance");
    const MatX j = unit_snr_channel_fim(cfg, sched, params);
    const MatX j_eta = efim_channel(j);
    const MatX js = state_fim(j_eta, jacobian_T(s));
    return scale_bounds(extract_bounds(constrained_crb(js, s.rotation(), known), j_eta), std::sqrt(sigma2 / cfg.p_b));
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string bound_csv_header()
{
    std::string h = "scenario_id,P_B_dBm,rho";
    for (const char *n : BoundReport::names())
        h += std::string(",") + n;
    return h;
}

std::string bound_csv_row(const std::string &scenario_id, double p_b_dbm, double rho, const BoundReport &b)
{
    std::string r = scenario_id + "," + format_double(p_b_dbm) + "," + format_double(rho);
    for (const double v : b.values())
        r += "," + format_double(v);
    return r;
}

} // namespace hrisloc
