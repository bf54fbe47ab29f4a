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
#include "hrisloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "hrisloc/random.hpp"

namespace hrisloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TrialOutcome
{
    bool ok = false;
    MetricArray sq{};
    EstimateResult est;
};

TrialOutcome run_trial(const Truth &truth, const RadioConfig &cfg, const CodebookSchedule &sched,
                       std::uint64_t noise_seed, const EstimatorConfig &ec)
{
    TrialOutcome o;
    try
    {
        const ObservationSet obs = synthesize(cfg, sched, truth.channel, noise_seed);
        o.est = run_pipeline(obs, sched, cfg, truth.scenario.p_b, ec);
        o.sq = squared_errors(o.est, truth);
        o.ok = std::all_of(o.sq.begin(), o.sq.end(), [](double v) { return std::isfinite(v); });
    }
    catch (const std::exception &)
    {
        o.ok = false;
    }
    return o;
}

void apply_sweep_value(SweepVariable v, double value, Scenario &s, RadioConfig &cfg, std::uint64_t seed)
{
    switch (v)
    {
    case SweepVariable::PB_dBm:
        cfg.p_b = dbm_to_watts(value);
        break;
    case SweepVariable::Rho:
        cfg.rho = value;
        break;
    case SweepVariable::NScatterers: {
        const int n = static_cast<int>(std::lround(value));
        const ScattererLists sc = place_scatterers(n / 2, n - n / 2, seed);
        s.scatterers_bu = sc.bu;
        s.scatterers_bru = sc.bru;
        break;
    }
    }
}

} // namespace

const char *to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::PB_dBm:
        return "P_B_dBm";
    case SweepVariable::Rho:
        return "rho";
    case SweepVariable::NScatterers:
        return "n_scatterers";
    }
    return "unknown";
}

MetricArray squared_errors(const EstimateResult &est, const Truth &truth)
{
    const ChannelParams &c = truth.channel;
    const ChannelParams &e = est.channel;
    const Scenario &s = truth.scenario;
    auto sq = [](double x) { return x * x; };
    auto ang = [&](const AnglePair &a, const AnglePair &b) { return sq(angle_error(a, b)); };
    return {
        sq(kSpeedOfLight * (e.tau_br - c.tau_br)),
        sq(kSpeedOfLight * (e.tau_bu - c.tau_bu)),
        sq(kSpeedOfLight * (e.tau_bru - c.tau_bru)),
        ang(e.theta_br, c.theta_br),
        ang(e.theta_bu, c.theta_bu),
        ang(e.theta_ru, c.theta_ru),
        ang(e.phi_rb, c.phi_rb),
        (est.p_r - s.p_r).squaredNorm(),
        (est.p_u - s.p_u).squaredNorm(),
        sq(est.b_r - s.b_r),
        sq(est.b_u - s.b_u),
        (est.r.matrix() - s.rotation().matrix()).squaredNorm(),
    };
}

BoundReport bounds_or_inf(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                          const ChannelParams &params)
{
    BoundReport b;
    const double sigma2 = noise_variance(cfg);
    if (!(sigma2 > 0.0))
        return b;
    const double scale = std::sqrt(sigma2 / cfg.p_b);
    MatX j_eta;
    try
    {
        j_eta = efim_channel(unit_snr_channel_fim(cfg, sched, params));
    }
    catch (const SingularMatrixError &)
    {
        b.teb_br = b.teb_bu = b.teb_bru = b.adeb_br = b.adeb_bu = b.adeb_ru = b.aaeb_rb = kInf;
        b.peb_r = b.peb_u = b.ceb_r = b.ceb_u = b.oeb = kInf;
        return b;
    }
    const MatX js = state_fim(j_eta, jacobian_T(s));
    try
    {
        return scale_bounds(extract_bounds(constrained_crb(js, s.rotation()), j_eta), scale);
    }
    catch (const SingularMatrixError &)
    {
        b = scale_bounds(extract_bounds(MatX::Zero(kStateDim, kStateDim), j_eta), scale);
        b.peb_r = b.peb_u = b.ceb_r = b.ceb_u = b.oeb = kInf;
        return b;
    }
}

int worker_count()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char *env = std::getenv("HRISLOC_THREADS"))
    {
        const int cap = std::atoi(env);
        if (cap > 0)
            n = n > 0 ? std::min(n, cap) : cap;
    }
    return std::max(1, n);
}

void parallel_for(int n, const std::function<void(int)> &body)
{
    const int workers = std::min(worker_count(), std::max(n, 1));
    if (workers <= 1)
    {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<MetricRow> monte_carlo(const Scenario &s0, const RadioConfig &cfg0, const GainModel &gains,
                                   const SweepSpec &spec, const EstimatorConfig &ec)
{
    if (spec.values.empty() || spec.trials < 1)
        throw Error(ErrorKind::InvalidConfig, "sweep needs at least one value and one trial");

    std::vector<MetricRow> rows;
    for (std::size_t pi = 0; pi < spec.values.size(); ++pi)
    {
        Scenario s = s0;
        RadioConfig cfg = cfg0;
        apply_sweep_value(spec.variable, spec.values[pi], s, cfg, derive_seed(spec.base_seed, {0x5ca7}));
        cfg.validate();

        const std::uint64_t sched_seed = derive_seed(spec.base_seed, {0x5c4e});
        const std::uint64_t gain_seed = derive_seed(spec.base_seed, {0x9a15});
        const CodebookSchedule base_sched = build_schedule(cfg, sched_seed);
        const Truth base_truth{s, channel_params_from_scenario(s, cfg, gains, gain_seed)};

        std::vector<TrialOutcome> out(static_cast<std::size_t>(spec.trials));
        parallel_for(spec.trials, [&](int t) {
            const std::uint64_t noise_seed = derive_seed(spec.base_seed, {0x4015e, pi, static_cast<std::uint64_t>(t)});
            if (!spec.redraw_per_trial)
            {
                out[static_cast<std::size_t>(t)] = run_trial(base_truth, cfg, base_sched, noise_seed, ec);
                return;
            }
            const auto tt = static_cast<std::uint64_t>(t);
            const CodebookSchedule sched = build_schedule(cfg, derive_seed(sched_seed, {pi, tt}));
            const Truth truth{s, channel_params_from_scenario(s, cfg, gains, derive_seed(gain_seed, {pi, tt}))};
            out[static_cast<std::size_t>(t)] = run_trial(truth, cfg, sched, noise_seed, ec);
        });

        MetricRow row;
        row.value = spec.values[pi];
        row.trials = spec.trials;
        MetricArray sum{};
        for (const auto &o : out)
        {
            if (!o.ok)
            {
                ++row.failures;
                continue;
            }
            for (int m = 0; m < BoundReport::kCount; ++m)
                sum[static_cast<std::size_t>(m)] += o.sq[static_cast<std::size_t>(m)];
        }
        const int ok = row.trials - row.failures;
        for (int m = 0; m < BoundReport::kCount; ++m)
            row.rmse[static_cast<std::size_t>(m)] =
                ok > 0 ? std::sqrt(sum[static_cast<std::size_t>(m)] / ok) : std::numeric_limits<double>::quiet_NaN();
        row.crb = bounds_or_inf(s, cfg, base_sched, base_truth.channel).values();
        rows.push_back(row);
    }
    return rows;
}

std::vector<BoundReport> rho_sweep_bounds(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                                          const ChannelParams &params, const std::vector<double> &rho_values)
{
    std::vector<BoundReport> out;
    out.reserve(rho_values.size());
    for (const double rho : rho_values)
    {
        if (!(rho > 0.0 && rho < 1.0))
            throw Error(ErrorKind::InvalidConfig, "rho values must lie in (0, 1)");
        RadioConfig c = cfg;
        c.rho = rho;
        out.push_back(bounds_or_inf(s, c, sched, params));
    }
    return out;
}

const std::array<const char *, 5> &QuantileRow::names()
{
    static const std::array<const char *, 5> n = {"p_r_m", "p_u_m", "b_r_s", "b_u_s", "r_fro"};
    return n;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<QuantileRow> scatterer_study(const Scenario &s0, const RadioConfig &cfg, const GainModel &gains,
                                         const std::vector<int> &n_values, int realizations, std::uint64_t base_seed,
                                         const EstimatorConfig &ec)
{
    if (realizations < 1)
        throw Error(ErrorKind::InvalidConfig, "realizations must be >= 1");
    cfg.validate();

    std::vector<QuantileRow> rows;
    for (const int n : n_values)
    {
        if (n < 0)
            throw Error(ErrorKind::InvalidConfig, "scatterer counts must be >= 0");
        std::vector<TrialOutcome> out(static_cast<std::size_t>(realizations));
        parallel_for(realizations, [&](int r) {
            const auto rr = static_cast<std::uint64_t>(r);
            Scenario s = s0;
            // Placement depends on the realisation only, so runs with different
            // N_s share their first scatterers.
            const ScattererLists sc = place_scatterers(n / 2, n - n / 2, derive_seed(base_seed, {0x5ca7, rr}));
            s.scatterers_bu = sc.bu;
            s.scatterers_bru = sc.bru;
            const CodebookSchedule sched = build_schedule(cfg, derive_seed(base_seed, {0x5c4e, rr}));
            const Truth truth{s, channel_params_from_scenario(s, cfg, gains, derive_seed(base_seed, {0x9a15, rr}))};
            out[static_cast<std::size_t>(r)] =
                run_trial(truth, cfg, sched, derive_seed(base_seed, {0x4015e, rr}), ec);
        });

        QuantileRow row;
        row.n_scatterers = n;
        row.runs = realizations;
        std::array<std::vector<double>, 5> errs;
        for (const auto &o : out)
        {
            if (!o.ok)
            {
                ++row.failures;
                continue;
            }
            errs[0].push_back(std::sqrt(o.sq[7]));
            errs[1].push_back(std::sqrt(o.sq[8]));
            errs[2].push_back(std::sqrt(o.sq[9]));
            errs[3].push_back(std::sqrt(o.sq[10]));
            errs[4].push_back(std::sqrt(o.sq[11]));
        }
        for (std::size_t m = 0; m < 5; ++m)
        {
            row.median[m] = quantile(errs[m], 0.5);
            row.p90[m] = quantile(errs[m], 0.9);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string metric_csv_header(SweepVariable variable)
{
    std::string h = std::string(to_string(variable)) + ",trials,failures";
    for (const char *n : BoundReport::names())
        h += std::string(",rmse_") + n;
    for (const char *n : BoundReport::names())
        h += std::string(",crb_") + n;
    return h;
}

void write_metric_csv(std::ostream &out, SweepVariable variable, const std::vector<MetricRow> &rows)
{
    out << metric_csv_header(variable) << '\n';
    for (const auto &r : rows)
    {
        out << format_double(r.value) << ',' << r.trials << ',' << r.failures;
        for (const double v : r.rmse)
            out << ',' << format_double(v);
        for (const double v : r.crb)
            out << ',' << format_double(v);
        out << '\n';
    }
}

void write_quantile_csv(std::ostream &out, const std::vector<QuantileRow> &rows)
{
    out << "n_scatterers,runs,failures";
    for (const char *n : QuantileRow::names())
        out << ",median_" << n;
    for (const char *n : QuantileRow::names())
        out << ",p90_" << n;
    out << '\n';
    for (const auto &r : rows)
    {
        out << r.n_scatterers << ',' << r.runs << ',' << r.failures;
        for (const double v : r.median)
            out << ',' << format_double(v);
        for (const double v : r.p90)
            out << ',' << format_double(v);
        out << '\n';
    }
}

} // namespace hrisloc
