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
#include "hrisloc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace hrisloc {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex &fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

CVec derotation(double tau, int K, double delta_f)
{
    CVec e(K);
    for (int k = 0; k < K; ++k)
        e(k) = std::polar(1.0, 2.0 * kPi * k * delta_f * tau);
    return e;
}

struct AngleGrid
{
    double az0 = 0.0, az_step = 0.0;
    double el0 = 0.0, el_step = 0.0;
    int n_az = 0, n_el = 0;

    AnglePair at(int i) const
    {
        const int ia = i / n_el, ie = i % n_el;
        return {az0 + (ia + 0.5) * az_step, el0 + (ie + 0.5) * el_step};
    }
    int size() const { return n_az * n_el; }

    std::vector<AnglePair> points() const
    {
        std::vector<AnglePair> p(static_cast<std::size_t>(size()));
        for (int i = 0; i < size(); ++i)
            p[static_cast<std::size_t>(i)] = at(i);
        return p;
    }

    static AngleGrid initial(int facing, int n)
    {
        AngleGrid g;
        g.n_az = g.n_el = n;
        g.el0 = 0.0;
        g.el_step = kPi / n;
        if (facing > 0)
        {
            g.az0 = 0.0;
            g.az_step = kPi / n;
        }
        else if (facing < 0)
        {
            g.az0 = -kPi;
            g.az_step = kPi / n;
        }
        else
        {
            g.az0 = -kPi;
            g.az_step = 2.0 * kPi / n;
        }
        return g;
    }

    AngleGrid refined(const AnglePair &centre, int n, double shrink) const
    {
        AngleGrid g;
        g.n_az = g.n_el = n;
        const double span_az = n_az * az_step / shrink;
        const double span_el = n_el * el_step / shrink;
        g.az_step = span_az / n;
        g.el_step = span_el / n;
        g.az0 = centre.azimuth - span_az / 2.0;
        g.el0 = centre.elevation - span_el / 2.0;
        return g;
    }
};

CMat steering_matrix(const ArrayGeometry &g, const std::vector<AnglePair> &pts)
{
    CMat a(g.size(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        a.col(static_cast<Eigen::Index>(i)) = steering(g, pts[i]);
    return a;
}

// median + 1.4826 * MAD
double robust_floor(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double med = *mid;
    for (auto &x : v)
        x = std::abs(x - med);
    std::nth_element(v.begin(), mid, v.end());
    return med + 1.4826 * (*mid);
}

void check_weak(const StageDiagnostics &d, const EstimatorConfig &ec, const char *what)
{
    if (ec.check_weak && !(d.peak > ec.weak_factor * d.noise_floor))
        throw Error(ErrorKind::WeakSignal, std::string(what) + ": peak correlation " + std::to_string(d.peak) +
                                               " below " + std::to_string(ec.weak_factor) + " x floor " +
                                               std::to_string(d.noise_floor));
}

// |z - w (w^H z) / |w|^2|^2 / |z|^2, in [0, 1]; equals one minus the
// normalised correlation but keeps full precision near a perfect fit.
double projection_residual(const CVec &w, const CVec &z, double z2)
{
    const double w2 = w.squaredNorm();
    if (!(w2 > 0.0) || !(z2 > 0.0))
        return 1.0;
    return (z - w * (w.dot(z) / w2)).squaredNorm() / z2;
}

CVec residual_of(const CVec &w, const CVec &z) { return z - w * (w.dot(z) / w.squaredNorm()); }

// Correlation magnitudes |w_i^H z| / |w_i| for every dictionary column.
std::vector<double> correlations(const CMat &W, const CVec &z)
{
    const Eigen::VectorXd num = (W.adjoint() * z).cwiseAbs();
    const Eigen::VectorXd den = W.colwise().norm().transpose();
    std::vector<double> c(static_cast<std::size_t>(W.cols()));
    for (Eigen::Index i = 0; i < W.cols(); ++i)
        c[static_cast<std::size_t>(i)] = den(i) > 0.0 ? num(i) / den(i) : 0.0;
    return c;
}

struct Search2d
{
    AnglePair angle;
    CVec w;
    StageDiagnostics diag;
};

// Grid search over one angle pair followed by Newton refinement of the
// projection residual of z onto w(psi) = M^T a(psi). The noise floor is
// taken from the dictionary correlations of the post-fit residual.
Search2d search_single(const CVec &z, const CMat &M, const ArrayGeometry &geom, int facing, int n,
                       const EstimatorConfig &ec, const char *stage)
{
    const double z2 = z.squaredNorm();
    const AngleGrid grid = AngleGrid::initial(facing, n);
    const CMat W = M.transpose() * steering_matrix(geom, grid.points());
    const std::vector<double> corr = correlations(W, z);
    const auto best = static_cast<int>(std::max_element(corr.begin(), corr.end()) - corr.begin());

    auto objective = [&](const Eigen::VectorXd &x) {
        return projection_residual(M.transpose() * steering(geom, {x(0), x(1)}), z, z2);
    };
    const AnglePair start = grid.at(best);
    const NewtonResult nr = newton_minimize(objective, Eigen::Vector2d(start.azimuth, start.elevation), ec.newton);

    Search2d out;
    out.angle = canonical({nr.x(0), nr.x(1)});
    out.w = M.transpose() * steering(geom, out.angle);
    out.diag.stage = stage;
    out.diag.peak = corr[static_cast<std::size_t>(best)];
    out.diag.noise_floor = robust_floor(correlations(W, residual_of(out.w, z)));
    out.diag.objective_init = nr.f_init;
    out.diag.objective_final = nr.f_final;
    out.diag.iterations = nr.iterations;
    check_weak(out.diag, ec, stage);
    return out;
}

CMat even_columns(const CMat &m)
{
    CMat out(m.rows(), m.cols() / 2);
    for (Eigen::Index t = 0; t < out.cols(); ++t)
        out.col(t) = m.col(2 * t);
    return out;
}

double wrap_period(double x, double period)
{
    double w = std::fmod(x, period);
    if (w < 0.0)
        w += period;
    if (w >= period)
        w -= period;
    return w;
}

double wrap_symmetric(double x, double period)
{
    double w = std::remainder(x, period); // [-P/2, P/2]
    if (w <= -period / 2.0)
        w += period;
    return w;
}

} // namespace

PipelineError::PipelineError(const Error &cause, std::string stage, EstimateResult partial)
    : Error(cause.kind(), stage + ": " + cause.detail()), stage_(std::move(stage)), partial_(std::move(partial))
{
}

double toa_objective(const CMat &y, double tau, double delta_f)
{
    const CVec e = derotation(tau, static_cast<int>(y.rows()), delta_f);
    return (y.transpose() * e).squaredNorm();
}

double estimate_toa(const CMat &y, const RadioConfig &cfg)
{
    const int K = static_cast<int>(y.rows());
    const int T = static_cast<int>(y.cols());
    if (K < 2 || T < 1)
        throw Error(ErrorKind::DimensionMismatch, "TOA estimation needs K >= 2 and T >= 1");
    const int N = std::max(cfg.n_fft, K);
    const double period = 1.0 / cfg.delta_f;

    // Zero-padded inverse DFT along the subcarrier axis, one column per snapshot.
    auto *buf = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(N) * T));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_many_dft(1, &N, T, buf, nullptr, 1, N, buf, nullptr, 1, N, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    std::fill_n(&buf[0][0], 2 * static_cast<std::size_t>(N) * T, 0.0);
    for (int t = 0; t < T; ++t)
        for (int k = 0; k < K; ++k)
        {
            buf[static_cast<std::size_t>(t) * N + k][0] = y(k, t).real();
            buf[static_cast<std::size_t>(t) * N + k][1] = y(k, t).imag();
        }
    fftw_execute(plan);

    std::vector<double> power(static_cast<std::size_t>(N), 0.0);
    for (int t = 0; t < T; ++t)
        for (int n = 0; n < N; ++n)
        {
            const auto &v = buf[static_cast<std::size_t>(t) * N + n];
            power[static_cast<std::size_t>(n)] += v[0] * v[0] + v[1] * v[1];
        }
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);

    const auto peak = static_cast<int>(std::max_element(power.begin(), power.end()) - power.begin());
    const double pm = power[static_cast<std::size_t>((peak - 1 + N) % N)];
    const double p0 = power[static_cast<std::size_t>(peak)];
    const double pp = power[static_cast<std::size_t>((peak + 1) % N)];
    const double curv = pm - 2.0 * p0 + pp;
    const double delta = curv < 0.0 ? std::clamp(0.5 * (pm - pp) / curv, -0.5, 0.5) : 0.0;
    double tau = (peak + delta) / (N * cfg.delta_f);

    // Newton ascent on f(tau) = sum_t |S_t|^2, S_t = sum_k e^{j w k tau} y_kt.
    const double omega = 2.0 * kPi * cfg.delta_f;
    CVec kw(K), kw2(K);
    for (int k = 0; k < K; ++k)
    {
        kw(k) = cplx(0.0, omega * k);
        kw2(k) = -(omega * k) * (omega * k);
    }
    double f = toa_objective(y, tau, cfg.delta_f);
    const double tol = 1e-12 / (K * cfg.delta_f);
    for (int it = 0; it < 50; ++it)
    {
        const CVec e = derotation(tau, K, cfg.delta_f);
        const CVec S = y.transpose() * e;
        const CVec S1 = y.transpose() * kw.cwiseProduct(e);
        const CVec S2 = y.transpose() * kw2.cwiseProduct(e);
        const double f1 = 2.0 * S.dot(S1).real();
        const double f2 = 2.0 * (S1.squaredNorm() + S.dot(S2).real());
        if (!(f2 < 0.0))
            break;
        double step = -f1 / f2;
        bool accepted = false;
        for (int h = 0; h < 30; ++h)
        {
            const double fn = toa_objective(y, tau + step, cfg.delta_f);
            if (fn >= f)
            {
                tau += step;
                f = fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || std::abs(step) < tol)
            break;
    }
    return wrap_period(tau, period);
}

BsHrisEstimate estimate_bs_hris_angles(const CMat &y_r, const CodebookSchedule &sched, const RadioConfig &cfg,
                                       double tau_hat, const EstimatorConfig &ec)
{
    const ArrayGeometry gb = bs_array(cfg), gr = ris_array(cfg);
    if (y_r.cols() != sched.T() || sched.f.rows() != gb.size() || sched.c.rows() != gr.size())
        throw Error(ErrorKind::DimensionMismatch, "Y_R does not match the schedule");

    const int K = static_cast<int>(y_r.rows());
    const CVec z = y_r.transpose() * derotation(tau_hat, K, cfg.delta_f);
    const double z2 = z.squaredNorm();
    const CMat Ft = sched.f.transpose(), Ct = sched.c.transpose();

    // Joint grid over (phi_rb, theta_br): correlation matrix via one product.
    struct Dictionary
    {
        CMat A, B;
    };
    auto dictionary = [&](const AngleGrid &gphi, const AngleGrid &gtheta) {
        return Dictionary{Ct * steering_matrix(gr, gphi.points()), Ft * steering_matrix(gb, gtheta.points())};
    };
    auto correlate = [](const Dictionary &d, const CVec &v) -> Eigen::MatrixXd {
        const CMat Av = v.asDiagonal() * d.A.conjugate();
        const CMat num = Av.transpose() * d.B.conjugate();
        const Eigen::MatrixXd den = d.A.cwiseAbs2().transpose() * d.B.cwiseAbs2();
        return num.cwiseAbs().cwiseQuotient(den.cwiseSqrt().cwiseMax(1e-300));
    };

    BsHrisEstimate out;
    out.diag.stage = "bs_hris";

    AngleGrid gphi = AngleGrid::initial(ec.ris_facing, ec.bs_hris_grid);
    AngleGrid gtheta = AngleGrid::initial(ec.bs_facing, ec.bs_hris_grid);
    const Dictionary coarse = dictionary(gphi, gtheta);
    Eigen::MatrixXd corr = correlate(coarse, z);
    Eigen::Index bi = 0, bj = 0;
    out.diag.peak = corr.maxCoeff(&bi, &bj);

    AnglePair phi = gphi.at(static_cast<int>(bi));
    AnglePair theta = gtheta.at(static_cast<int>(bj));
    for (int level = 0; level < ec.refine_levels; ++level)
    {
        gphi = gphi.refined(phi, ec.bs_hris_refine_grid, ec.refine_shrink);
        gtheta = gtheta.refined(theta, ec.bs_hris_refine_grid, ec.refine_shrink);
        corr = correlate(dictionary(gphi, gtheta), z);
        corr.maxCoeff(&bi, &bj);
        phi = gphi.at(static_cast<int>(bi));
        theta = gtheta.at(static_cast<int>(bj));
    }

    auto w_of = [&](const AnglePair &th, const AnglePair &ph) -> CVec {
        return (Ct * steering(gr, ph)).cwiseProduct(Ft * steering(gb, th));
    };
    auto objective = [&](const Eigen::VectorXd &x) {
        return projection_residual(w_of({x(0), x(1)}, {x(2), x(3)}), z, z2);
    };
    const NewtonResult nr = newton_minimize(
        objective, Eigen::Vector4d(theta.azimuth, theta.elevation, phi.azimuth, phi.elevation), ec.newton);
    out.theta_br = canonical({nr.x(0), nr.x(1)});
    out.phi_rb = canonical({nr.x(2), nr.x(3)});
    out.diag.objective_init = nr.f_init;
    out.diag.objective_final = nr.f_final;
    out.diag.iterations = nr.iterations;

    const CVec w = w_of(out.theta_br, out.phi_rb);
    const Eigen::MatrixXd floor_corr = correlate(coarse, residual_of(w, z));
    out.diag.noise_floor =
        robust_floor(std::vector<double>(floor_corr.data(), floor_corr.data() + floor_corr.size()));
    check_weak(out.diag, ec, "bs_hris");
    out.g_br = w.dot(z) / (w.squaredNorm() * K * std::sqrt(cfg.rho * cfg.p_b));
    return out;
}

SeparatedPaths separate_paths(const CMat &y_u)
{
    if (y_u.cols() % 2 != 0)
        throw Error(ErrorKind::OddT, "Y_U must have an even number of columns");
    const Eigen::Index half = y_u.cols() / 2;
    SeparatedPaths s{CMat(y_u.rows(), half), CMat(y_u.rows(), half)};
    for (Eigen::Index t = 0; t < half; ++t)
    {
        s.z_bu.col(t) = y_u.col(2 * t) + y_u.col(2 * t + 1);
        s.z_bru.col(t) = y_u.col(2 * t) - y_u.col(2 * t + 1);
    }
    return s;
}

PathEstimate estimate_bu(const CMat &z_bu, const CodebookSchedule &sched, const RadioConfig &cfg,
                         const EstimatorConfig &ec)
{
    if (2 * z_bu.cols() != sched.T())
        throw Error(ErrorKind::DimensionMismatch, "Z_BU must have T/2 columns");
    const int K = static_cast<int>(z_bu.rows());

    PathEstimate out;
    out.tau = estimate_toa(z_bu, cfg);
    const CVec z = z_bu.transpose() * derotation(out.tau, K, cfg.delta_f);
    const Search2d s = search_single(z, even_columns(sched.f), bs_array(cfg), ec.bs_facing, ec.ue_grid, ec, "bs_ue");
    out.angle = s.angle;
    out.diag = s.diag;
    out.gain = s.w.dot(z) / (s.w.squaredNorm() * 2.0 * K * std::sqrt(cfg.p_b));
    return out;
}

PathEstimate estimate_bru(const CMat &z_bru, const CodebookSchedule &sched, const RadioConfig &cfg,
                          const AnglePair &theta_br_hat, const AnglePair &phi_rb_hat, const EstimatorConfig &ec)
{
    if (2 * z_bru.cols() != sched.T())
        throw Error(ErrorKind::DimensionMismatch, "Z_BRU must have T/2 columns");
    const int K = static_cast<int>(z_bru.rows());
    const ArrayGeometry gr = ris_array(cfg);

    // b_2t = diag(gamma_2t) a_R(phi) a_B^T(theta) f_2t
    const CVec a_rb = steering(gr, phi_rb_hat);
    const CMat f_even = even_columns(sched.f);
    const CVec bf = f_even.transpose() * steering(bs_array(cfg), theta_br_hat);
    CMat B = even_columns(sched.gamma);
    for (Eigen::Index t = 0; t < B.cols(); ++t)
        B.col(t) = B.col(t).cwiseProduct(a_rb) * bf(t);

    PathEstimate out;
    out.tau = estimate_toa(z_bru, cfg);
    const CVec z = z_bru.transpose() * derotation(out.tau, K, cfg.delta_f);
    const Search2d s = search_single(z, B, gr, ec.ris_facing, ec.ue_grid, ec, "bs_hris_ue");
    out.angle = s.angle;
    out.diag = s.diag;
    out.gain = s.w.dot(z) / (s.w.squaredNorm() * 2.0 * K * std::sqrt((1.0 - cfg.rho) * cfg.p_b));
    return out;
}

TriangleSolution solve_positions_and_clocks(const ChannelParams &est, const Position &p_b)
{
    auto angle_between = [](const AnglePair &a, const AnglePair &b) {
        const Vec3 u = kappa(a), v = kappa(b);
        return std::atan2(u.cross(v).norm(), u.dot(v));
    };
    const double c = kSpeedOfLight;
    const double d_hat = c * (est.tau_bru - est.tau_bu);
    const double b0 = angle_between(est.theta_ru, est.phi_rb);
    const double b1 = angle_between(est.theta_bu, est.theta_br);
    const double b2 = kPi - b0 - b1;
    const double den = std::sin(b2) + std::sin(b1) - std::sin(b0);
    if (!(den > 1e-9))
        throw Error(ErrorKind::DegenerateTriangle, "law-of-sines denominator " + std::to_string(den));

    TriangleSolution s;
    s.d_bu = d_hat * std::sin(b0) / den;
    s.d_br = d_hat * std::sin(b2) / den;
    s.p_r = p_b + s.d_br * kappa(est.theta_br);
    s.p_u = p_b + s.d_bu * kappa(est.theta_bu);
    s.b_r = est.tau_br - s.d_br / c;
    s.b_u = est.tau_bu - s.d_bu / c;
    return s;
}

namespace {

struct ProcrustesInputs
{
    Eigen::Matrix<double, 3, 2> theta;
    Eigen::Matrix<double, 3, 2> q;
};

ProcrustesInputs procrustes_inputs(const AnglePair &phi_rb_hat, const AnglePair &theta_ru_hat, const Position &p_r,
                                   const Position &p_u, const Position &p_b)
{
    const Vec3 to_b = p_b - p_r, to_u = p_u - p_r;
    if (to_b.norm() < 1e-9 || to_u.norm() < 1e-9)
        throw Error(ErrorKind::DegenerateDirections, "HRIS position coincides with the BS or UE");
    ProcrustesInputs in;
    in.theta.col(0) = kappa(phi_rb_hat);
    in.theta.col(1) = kappa(theta_ru_hat);
    in.q.col(0) = to_b.normalized();
    in.q.col(1) = to_u.normalized();
    if (in.theta.col(0).cross(in.theta.col(1)).norm() < 1e-9 || in.q.col(0).cross(in.q.col(1)).norm() < 1e-9)
        throw Error(ErrorKind::DegenerateDirections, "direction pair is parallel");
    return in;
}

} // namespace

Rotation estimate_rotation(const AnglePair &phi_rb_hat, const AnglePair &theta_ru_hat, const Position &p_r_hat,
                           const Position &p_u_hat, const Position &p_b)
{
    const ProcrustesInputs in = procrustes_inputs(phi_rb_hat, theta_ru_hat, p_r_hat, p_u_hat, p_b);
    const Mat3 m = in.q * in.theta.transpose();
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 &u0 = svd.matrixU();
    const Mat3 &u1 = svd.matrixV();
    Mat3 d = Mat3::Identity();
    d(2, 2) = (u0 * u1.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    Mat3 r = u0 * d * u1.transpose();

    // One polar step removes rounding drift from orthogonality.
    Eigen::JacobiSVD<Mat3> clean(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = clean.matrixU() * clean.matrixV().transpose();
    return Rotation(r, 1e-10);
}

double rotation_objective(const Rotation &r, const AnglePair &phi_rb_hat, const AnglePair &theta_ru_hat,
                          const Position &p_r_hat, const Position &p_u_hat, const Position &p_b)
{
    const ProcrustesInputs in = procrustes_inputs(phi_rb_hat, theta_ru_hat, p_r_hat, p_u_hat, p_b);
    return (in.q - r.matrix() * in.theta).squaredNorm();
}

EstimateResult run_pipeline(const ObservationSet &obs, const CodebookSchedule &sched, const RadioConfig &cfg,
                            const Position &p_b, const EstimatorConfig &ec)
{
    EstimateResult res;
    const double period = 1.0 / cfg.delta_f;
    std::string stage = "bs_hris";
    try
    {
        if (obs.y_r.rows() != cfg.K || obs.y_u.rows() != cfg.K || obs.y_r.cols() != cfg.T ||
            obs.y_u.cols() != cfg.T)
            throw Error(ErrorKind::DimensionMismatch, "observations do not match K x T");

        res.channel.tau_br = estimate_toa(obs.y_r, cfg);
        const BsHrisEstimate s1 = estimate_bs_hris_angles(obs.y_r, sched, cfg, res.channel.tau_br, ec);
        res.channel.theta_br = s1.theta_br;
        res.channel.phi_rb = s1.phi_rb;
        res.channel.g_br = s1.g_br;
        res.diagnostics.push_back(s1.diag);

        stage = "separation";
        const SeparatedPaths sep = separate_paths(obs.y_u);

        stage = "bs_ue";
        const PathEstimate bu = estimate_bu(sep.z_bu, sched, cfg, ec);
        res.channel.tau_bu = bu.tau;
        res.channel.theta_bu = bu.angle;
        res.channel.g_bu = bu.gain;
        res.diagnostics.push_back(bu.diag);

        stage = "bs_hris_ue";
        const PathEstimate bru = estimate_bru(sep.z_bru, sched, cfg, s1.theta_br, s1.phi_rb, ec);
        // Keep the BRU delay on the same branch as the BU delay.
        res.channel.tau_bru = res.channel.tau_bu + wrap_symmetric(bru.tau - res.channel.tau_bu, period);
        res.channel.theta_ru = bru.angle;
        res.channel.g_bru = bru.gain;
        res.diagnostics.push_back(bru.diag);

        stage = "positions";
        const TriangleSolution tri = solve_positions_and_clocks(res.channel, p_b);
        res.p_r = tri.p_r;
        res.p_u = tri.p_u;
        res.b_r = wrap_symmetric(tri.b_r, period);
        res.b_u = wrap_symmetric(tri.b_u, period);

        stage = "rotation";
        res.r = estimate_rotation(res.channel.phi_rb, res.channel.theta_ru, res.p_r, res.p_u, p_b);
    }
    catch (const PipelineError &)
    {
        throw;
    }
    catch (const Error &e)
    {
        throw PipelineError(e, stage, res);
    }
    return res;
}

} // namespace hrisloc
