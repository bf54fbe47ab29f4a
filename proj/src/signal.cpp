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
#include "hrisloc/signal.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hrisloc/errors.hpp"
#include "hrisloc/random.hpp"

namespace hrisloc {

static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'H', 'R', 'I', 'S', 'O', 'B', 'S', '1'};

double distance_checked(const Position &a, const Position &b, const char *what)
{
    const double d = (a - b).norm();
    if (!(d >= 1e-9))
        throw Error(ErrorKind::DegenerateGeometry, std::string("coincident nodes: ") + what);
    return d;
}

AnglePair local_angles(const Rotation &r, const Position &from, const Position &to)
{
    return angles_from_direction(direction_local(r, from, to));
}

cplx random_phase(Rng &rng)
{
    const double phi = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
    return std::polar(1.0, -phi);
}

CVec dft_beam(int rows, int cols, int index, double scale)
{
    const int ir = index / cols;
    const int ic = index % cols;
    CVec v(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
        {
            const double ph = 2.0 * kPi * (static_cast<double>(r * ir) / rows + static_cast<double>(c * ic) / cols);
            v(r * cols + c) = std::polar(scale, ph);
        }
    return v;
}

} // namespace

ArrayGeometry bs_array(const RadioConfig &cfg) { return {cfg.bs_rows, cfg.bs_cols, cfg.element_spacing, cfg.lambda}; }

ArrayGeometry ris_array(const RadioConfig &cfg)
{
    return {cfg.ris_rows, cfg.ris_cols, cfg.element_spacing, cfg.lambda};
}

CVec steering(const ArrayGeometry &g, const AnglePair &psi)
{
    const double k = 2.0 * kPi * g.spacing / g.lambda;
    const double ur = std::sin(psi.elevation) * std::cos(psi.azimuth);
    const double uc = std::cos(psi.elevation);
    CVec a(g.size());
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            a(r * g.cols + c) = std::polar(1.0, -k * (r * ur + c * uc));
    return a;
}

SteeringJet steering_jet(const ArrayGeometry &g, const AnglePair &psi)
{
    const double k = 2.0 * kPi * g.spacing / g.lambda;
    const double se = std::sin(psi.elevation), ce = std::cos(psi.elevation);
    const double sa = std::sin(psi.azimuth), ca = std::cos(psi.azimuth);
    const double ur = se * ca, uc = ce;
    const double ur_az = -se * sa, ur_el = ce * ca, uc_el = -se;

    SteeringJet j{CVec(g.size()), CVec(g.size()), CVec(g.size())};
    const cplx mj(0.0, -1.0);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
        {
            const int m = r * g.cols + c;
            const cplx v = std::polar(1.0, -k * (r * ur + c * uc));
            j.a(m) = v;
            j.d_az(m) = mj * k * (r * ur_az) * v;
            j.d_el(m) = mj * k * (r * ur_el + c * uc_el) * v;
        }
    return j;
}

CVec delay_steering(double tau, int K, double delta_f)
{
    CVec d(K);
    for (int k = 0; k < K; ++k)
        d(k) = std::polar(1.0, -2.0 * kPi * k * delta_f * tau);
    return d;
}

ChannelParams channel_params_from_scenario(const Scenario &s, const RadioConfig &cfg, const GainModel &gains,
                                           std::uint64_t seed)
{
    const Rotation rot = s.rotation();
    const Rotation identity;
    const double c = kSpeedOfLight;

    const double d_br = distance_checked(s.p_r, s.p_b, "BS-HRIS");
    const double d_bu = distance_checked(s.p_u, s.p_b, "BS-UE");
    const double d_ru = distance_checked(s.p_u, s.p_r, "HRIS-UE");

    ChannelParams p;
    p.tau_br = d_br / c + s.b_r;
    p.tau_bu = d_bu / c + s.b_u;
    p.tau_bru = (d_br + d_ru) / c + s.b_u;
    p.theta_br = local_angles(identity, s.p_b, s.p_r);
    p.theta_bu = local_angles(identity, s.p_b, s.p_u);
    p.theta_ru = local_angles(rot, s.p_r, s.p_u);
    p.phi_rb = local_angles(rot, s.p_r, s.p_b);

    double a_br, a_bu, a_bru;
    if (gains.kind == GainModel::Kind::FreeSpace)
    {
        a_br = cfg.lambda / (4.0 * kPi * d_br);
        a_bu = cfg.lambda / (4.0 * kPi * d_bu);
        a_bru = a_br * cfg.lambda / (4.0 * kPi * d_ru);
    }
    else
    {
        a_br = gains.fixed_br;
        a_bu = gains.fixed_bu;
        a_bru = gains.fixed_bru;
    }

    Rng rng(derive_seed(seed, {0x9a1}));
    p.g_br = a_br * random_phase(rng);
    p.g_bu = a_bu * random_phase(rng);
    p.g_bru = a_bru * random_phase(rng);

    // Bistatic radar equation amplitude.
    const double radar = cfg.lambda * std::sqrt(s.rcs) / std::pow(4.0 * kPi, 1.5);
    for (const auto &sp : s.scatterers_bu)
    {
        const double d1 = distance_checked(sp, s.p_b, "BS-SP");
        const double d2 = distance_checked(sp, s.p_u, "SP-UE");
        ScatterPath path;
        path.tau = (d1 + d2) / c + s.b_u;
        path.angle = local_angles(identity, s.p_b, sp);
        path.gain = radar / (d1 * d2) * random_phase(rng);
        p.bsu.push_back(path);
    }
    for (const auto &sp : s.scatterers_bru)
    {
        const double d1 = distance_checked(sp, s.p_r, "HRIS-SP");
        const double d2 = distance_checked(sp, s.p_u, "SP-UE");
        ScatterPath path;
        path.tau = (d_br + d1 + d2) / c + s.b_u;
        path.angle = local_angles(rot, s.p_r, sp);
        path.gain = a_br * radar / (d1 * d2) * random_phase(rng);
        p.brsu.push_back(path);
    }
    return p;
}

CodebookSchedule build_schedule(const RadioConfig &cfg, std::uint64_t seed)
{
    if (cfg.T % 2 != 0)
        throw Error(ErrorKind::OddT, "T must be even, got " + std::to_string(cfg.T));
    const int T = cfg.T;
    const int mb = cfg.bs_elements();
    const int mr = cfg.ris_elements();

    CodebookSchedule s;
    s.f.resize(mb, T);
    s.c.resize(mr, T);
    s.gamma.resize(mr, T);

    const double fscale = 1.0 / std::sqrt(static_cast<double>(mb));
    for (int t = 0; t < T; ++t)
    {
        s.f.col(t) = dft_beam(cfg.bs_rows, cfg.bs_cols, (t / 2) % mb, fscale);
        const int ci = T < mr ? static_cast<int>((static_cast<long long>(t) * mr) / T) : t % mr;
        s.c.col(t) = dft_beam(cfg.ris_rows, cfg.ris_cols, ci, 1.0);
    }

    Rng rng(derive_seed(seed, {0x7e5}));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int t = 0; t < T; t += 2)
    {
        for (int m = 0; m < mr; ++m)
            s.gamma(m, t) = std::polar(1.0, phase(rng));
        s.gamma.col(t + 1) = -s.gamma.col(t);
    }
    return s;
}

PathFactors path_factors(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &p)
{
    const ArrayGeometry gb = bs_array(cfg), gr = ris_array(cfg);
    if (sched.f.rows() != gb.size() || sched.c.rows() != gr.size() || sched.gamma.rows() != gr.size() ||
        sched.c.cols() != sched.f.cols() || sched.gamma.cols() != sched.f.cols())
        throw Error(ErrorKind::DimensionMismatch, "schedule does not match array sizes");

    const CVec a_br = steering(gb, p.theta_br);
    const CVec a_bu = steering(gb, p.theta_bu);
    const CVec a_rb = steering(gr, p.phi_rb);
    const CVec a_ru = steering(gr, p.theta_ru);

    const CVec bf_br = sched.f.transpose() * a_br;
    PathFactors out;
    out.s_r = (sched.c.transpose() * a_rb).cwiseProduct(bf_br);
    out.s_bu = sched.f.transpose() * a_bu;
    out.s_bru = (sched.gamma.transpose() * a_ru.cwiseProduct(a_rb)).cwiseProduct(bf_br);
    return out;
}

ObservationSet noiseless_observations(const RadioConfig &cfg, const CodebookSchedule &sched,
                                      const ChannelParams &params)
{
    if (sched.T() != cfg.T)
        throw Error(ErrorKind::DimensionMismatch, "schedule length differs from T");
    const PathFactors pf = path_factors(cfg, sched, params);
    const double sp = std::sqrt(cfg.p_b);
    const double sr = std::sqrt(cfg.rho * cfg.p_b);
    const double su = std::sqrt((1.0 - cfg.rho) * cfg.p_b);
    const int K = cfg.K;

    ObservationSet obs;
    obs.y_r = (params.g_br * sr) * delay_steering(params.tau_br, K, cfg.delta_f) * pf.s_r.transpose();
    obs.y_u = (params.g_bu * sp) * delay_steering(params.tau_bu, K, cfg.delta_f) * pf.s_bu.transpose();
    obs.y_u += (params.g_bru * su) * delay_steering(params.tau_bru, K, cfg.delta_f) * pf.s_bru.transpose();

    if (!params.bsu.empty() || !params.brsu.empty())
    {
        const ArrayGeometry gb = bs_array(cfg), gr = ris_array(cfg);
        for (const auto &sp_path : params.bsu)
        {
            const CVec s = sched.f.transpose() * steering(gb, sp_path.angle);
            obs.y_u += (sp_path.gain * sp) * delay_steering(sp_path.tau, K, cfg.delta_f) * s.transpose();
        }
        if (!params.brsu.empty())
        {
            const CVec a_rb = steering(gr, params.phi_rb);
            const CVec bf_br = sched.f.transpose() * steering(gb, params.theta_br);
            for (const auto &sp_path : params.brsu)
            {
                const CVec s =
                    (sched.gamma.transpose() * steering(gr, sp_path.angle).cwiseProduct(a_rb)).cwiseProduct(bf_br);
                obs.y_u += (sp_path.gain * su) * delay_steering(sp_path.tau, K, cfg.delta_f) * s.transpose();
            }
        }
    }
    return obs;
}

ObservationSet synthesize(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params,
                          std::uint64_t noise_seed)
{
    ObservationSet obs = noiseless_observations(cfg, sched, params);
    const double sigma2 = noise_variance(cfg);
    if (sigma2 <= 0.0)
        return obs;

    std::normal_distribution<double> n(0.0, std::sqrt(sigma2 / 2.0));
    auto add_noise = [&n](CMat &y, Rng &rng) {
        for (Eigen::Index t = 0; t < y.cols(); ++t)
            for (Eigen::Index k = 0; k < y.rows(); ++k)
            {
                const double re = n(rng);
                const double im = n(rng);
                y(k, t) += cplx(re, im);
            }
    };
    Rng rng_r(derive_seed(noise_seed, {0x11}));
    Rng rng_u(derive_seed(noise_seed, {0x22}));
    add_noise(obs.y_r, rng_r);
    add_noise(obs.y_u, rng_u);
    return obs;
}

void write_observations(const ObservationSet &obs, const std::string &path)
{
    if (obs.y_r.rows() != obs.y_u.rows() || obs.y_r.cols() != obs.y_u.cols())
        throw Error(ErrorKind::DimensionMismatch, "Y_R and Y_U differ in shape");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path);
    const auto K = static_cast<std::uint32_t>(obs.y_r.rows());
    const auto T = static_cast<std::uint32_t>(obs.y_r.cols());
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char *>(&K), sizeof K);
    out.write(reinterpret_cast<const char *>(&T), sizeof T);
    for (const CMat *m : {&obs.y_r, &obs.y_u})
        for (std::uint32_t k = 0; k < K; ++k)
            for (std::uint32_t t = 0; t < T; ++t)
            {
                const double v[2] = {(*m)(k, t).real(), (*m)(k, t).imag()};
                out.write(reinterpret_cast<const char *>(v), sizeof v);
            }
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path);
}

ObservationSet read_observations(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path);
    char magic[8];
    std::uint32_t K = 0, T = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char *>(&K), sizeof K);
    in.read(reinterpret_cast<char *>(&T), sizeof T);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw Error(ErrorKind::Io, "not an observation file: " + path);

    ObservationSet obs{CMat(K, T), CMat(K, T)};
    for (CMat *m : {&obs.y_r, &obs.y_u})
        for (std::uint32_t k = 0; k < K; ++k)
            for (std::uint32_t t = 0; t < T; ++t)
            {
                double v[2];
                in.read(reinterpret_cast<char *>(v), sizeof v);
                (*m)(k, t) = cplx(v[0], v[1]);
            }
    if (!in)
        throw Error(ErrorKind::Io, "truncated observation file: " + path);
    return obs;
}

} // namespace hrisloc
