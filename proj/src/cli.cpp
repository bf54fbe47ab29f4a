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
#include "hrisloc/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrisloc/estimator.hpp"
#include "hrisloc/experiment.hpp"
#include "hrisloc/fim.hpp"
#include "hrisloc/random.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

namespace hrisloc {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEstimation = 2;

struct CommonOptions
{
    std::string scenario = "default";
    std::optional<double> pb_dbm;
    std::optional<double> rho;
    int trials = 100;
    std::uint64_t seed = 1;
    std::string output;
    std::vector<std::string> overrides;
};

struct Loaded
{
    ScenarioFile file;
    Scenario scenario;
    RadioConfig cfg;
    GainModel gains;
};

Loaded load(const CommonOptions &o)
{
    Loaded l;
    l.file = o.scenario == "default" ? ScenarioFile{} : load_scenario_file(o.scenario);
    for (const auto &kv : o.overrides)
        apply_override(l.file, kv);
    if (o.pb_dbm)
        l.file.p_b_dbm = *o.pb_dbm;
    if (o.rho)
        l.file.rho = *o.rho;
    l.scenario = l.file.scenario();
    l.cfg = l.file.radio();
    l.gains = l.file.gains();
    l.cfg.validate();
    return l;
}

void add_common(CLI::App *sub, CommonOptions &o, bool with_trials)
{
    sub->add_option("--scenario", o.scenario, "Scenario JSON file or 'default'");
    sub->add_option("--pb-dbm", o.pb_dbm, "Transmit power per subcarrier [dBm]");
    sub->add_option("--rho", o.rho, "HRIS power splitting ratio");
    if (with_trials)
        sub->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Base random seed");
    sub->add_option("-o,--output", o.output, "Output file (default: standard output)");
    sub->add_option("--override", o.overrides, "Scenario override key=value (repeatable)");
}

// Writes to the output file if one was given, otherwise to `out`.
void emit(const CommonOptions &o, std::ostream &out, const std::string &text)
{
    if (o.output.empty())
    {
        out << text;
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f)
        throw Error(ErrorKind::Io, "cannot write " + o.output);
    f << text;
}

std::uint64_t sched_seed(std::uint64_t s) { return derive_seed(s, {0x5c4e}); }
std::uint64_t gain_seed(std::uint64_t s) { return derive_seed(s, {0x9a15}); }
std::uint64_t noise_seed(std::uint64_t s) { return derive_seed(s, {0x4015e}); }

std::string fmt_pair(const AnglePair &a) { return format_double(a.azimuth) + " " + format_double(a.elevation); }
std::string fmt_vec(const Vec3 &v)
{
    return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

int cmd_crb(const CommonOptions &o, std::ostream &out)
{
    const Loaded l = load(o);
    const CodebookSchedule sched = build_schedule(l.cfg, sched_seed(o.seed));
    const ChannelParams params = channel_params_from_scenario(l.scenario, l.cfg, l.gains, gain_seed(o.seed));
    const BoundReport b = compute_bounds(l.scenario, l.cfg, sched, params);
    emit(o, out, bound_csv_header() + "\n" + bound_csv_row(l.file.scenario_id, l.file.p_b_dbm, l.cfg.rho, b) + "\n");
    return kExitOk;
}

int cmd_run(const CommonOptions &o, const std::string &dump, std::ostream &out, std::ostream &err)
{
    const Loaded l = load(o);
    const CodebookSchedule sched = build_schedule(l.cfg, sched_seed(o.seed));
    const ChannelParams truth = channel_params_from_scenario(l.scenario, l.cfg, l.gains, gain_seed(o.seed));
    const ObservationSet obs = synthesize(l.cfg, sched, truth, noise_seed(o.seed));
    if (!dump.empty())
        write_observations(obs, dump);

    EstimateResult est;
    try
    {
        est = run_pipeline(obs, sched, l.cfg, l.scenario.p_b);
    }
    catch (const PipelineError &e)
    {
        err << "estimation failed: " << e.what() << '\n';
        return kExitEstimation;
    }

    std::ostringstream s;
    const Mat3 r_true = l.scenario.rotation().matrix();
    s << "tau_br " << format_double(est.channel.tau_br) << " delta " << format_double(est.channel.tau_br - truth.tau_br)
      << '\n';
    s << "tau_bu " << format_double(est.channel.tau_bu) << " delta " << format_double(est.channel.tau_bu - truth.tau_bu)
      << '\n';
    s << "tau_bru " << format_double(est.channel.tau_bru) << " delta "
      << format_double(est.channel.tau_bru - truth.tau_bru) << '\n';
    s << "theta_br " << fmt_pair(est.channel.theta_br) << " error "
      << format_double(angle_error(est.channel.theta_br, truth.theta_br)) << '\n';
    s << "theta_bu " << fmt_pair(est.channel.theta_bu) << " error "
      << format_double(angle_error(est.channel.theta_bu, truth.theta_bu)) << '\n';
    s << "theta_ru " << fmt_pair(est.channel.theta_ru) << " error "
      << format_double(angle_error(est.channel.theta_ru, truth.theta_ru)) << '\n';
    s << "phi_rb " << fmt_pair(est.channel.phi_rb) << " error "
      << format_double(angle_error(est.channel.phi_rb, truth.phi_rb)) << '\n';
    s << "p_r " << fmt_vec(est.p_r) << " error " << format_double((est.p_r - l.scenario.p_r).norm()) << '\n';
    s << "p_u " << fmt_vec(est.p_u) << " error " << format_double((est.p_u - l.scenario.p_u).norm()) << '\n';
    s << "b_r " << format_double(est.b_r) << " delta " << format_double(est.b_r - l.scenario.b_r) << '\n';
    s << "b_u " << format_double(est.b_u) << " delta " << format_double(est.b_u - l.scenario.b_u) << '\n';
    s << "r_error_fro " << format_double((est.r.matrix() - r_true).norm()) << '\n';
    for (const auto &d : est.diagnostics)
        s << "stage " << d.stage << " iterations " << d.iterations << " objective " << format_double(d.objective_init)
          << " -> " << format_double(d.objective_final) << " peak " << format_double(d.peak) << " floor "
          << format_double(d.noise_floor) << '\n';
    emit(o, out, s.str());
    return kExitOk;
}

int finish_sweep(const CommonOptions &o, std::ostream &out, std::ostream &err, SweepVariable var,
                 const std::vector<MetricRow> &rows)
{
    std::ostringstream s;
    write_metric_csv(s, var, rows);
    emit(o, out, s.str());
    for (const auto &r : rows)
        if (r.failures < r.trials)
            return kExitOk;
    err << "all trials failed\n";
    return kExitEstimation;
}

int cmd_mc(const CommonOptions &o, std::ostream &out, std::ostream &err)
{
    const Loaded l = load(o);
    SweepSpec spec;
    spec.variable = SweepVariable::PB_dBm;
    spec.values = {l.file.p_b_dbm};
    spec.trials = o.trials;
    spec.base_seed = o.seed;
    return finish_sweep(o, out, err, spec.variable, monte_carlo(l.scenario, l.cfg, l.gains, spec));
}

int cmd_sweep_power(const CommonOptions &o, std::vector<double> values, std::ostream &out, std::ostream &err)
{
    const Loaded l = load(o);
    SweepSpec spec;
    spec.variable = SweepVariable::PB_dBm;
    spec.values = std::move(values);
    spec.trials = o.trials;
    spec.base_seed = o.seed;
    return finish_sweep(o, out, err, spec.variable, monte_carlo(l.scenario, l.cfg, l.gains, spec));
}

int cmd_sweep_rho(const CommonOptions &o, const std::vector<double> &values, std::ostream &out)
{
    const Loaded l = load(o);
    const CodebookSchedule sched = build_schedule(l.cfg, sched_seed(o.seed));
    const ChannelParams params = channel_params_from_scenario(l.scenario, l.cfg, l.gains, gain_seed(o.seed));
    const auto reports = rho_sweep_bounds(l.scenario, l.cfg, sched, params, values);
    std::string text = bound_csv_header() + "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        text += bound_csv_row(l.file.scenario_id, l.file.p_b_dbm, values[i], reports[i]) + "\n";
    emit(o, out, text);
    return kExitOk;
}

int cmd_scatterers(const CommonOptions &o, const std::vector<int> &ns, int realizations, std::ostream &out,
                   std::ostream &err)
{
    const Loaded l = load(o);
    const auto rows = scatterer_study(l.scenario, l.cfg, l.gains, ns, realizations, o.seed);
    std::ostringstream s;
    write_quantile_csv(s, rows);
    emit(o, out, s.str());
    for (const auto &r : rows)
        if (r.failures < r.runs)
            return kExitOk;
    err << "all runs failed\n";
    return kExitEstimation;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Hybrid-RIS joint localization: bounds, estimation and Monte Carlo sweeps", "hrisloc"};
    app.require_subcommand(1);

    CommonOptions o;
    std::string dump;
    std::vector<double> pb_values{9, 12, 15, 18, 21, 24, 27, 30};
    std::vector<double> rho_values{1e-6, 0.009, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0 - 1e-6};
    std::vector<int> ns_values{0, 2, 4, 8};
    int realizations = 100;

    auto *crb = app.add_subcommand("crb", "Print the error bounds as one CSV row");
    add_common(crb, o, false);

    auto *run = app.add_subcommand("run", "Estimate once from one synthesized observation");
    add_common(run, o, false);
    run->add_option("--dump", dump, "Write the observation set to this binary file");

    auto *mc = app.add_subcommand("mc", "Monte Carlo RMSE and bounds at one operating point");
    add_common(mc, o, true);

    auto *sp = app.add_subcommand("sweep-power", "Monte Carlo over transmit powers");
    add_common(sp, o, true);
    sp->add_option("--values", pb_values, "Powers in dBm")->delimiter(',');

    auto *sr = app.add_subcommand("sweep-rho", "Bounds over power splitting ratios");
    add_common(sr, o, false);
    sr->add_option("--values", rho_values, "Ratios in (0, 1)")->delimiter(',');

    auto *sc = app.add_subcommand("scatterers", "Error quantiles with unmodelled scatterers");
    add_common(sc, o, false);
    sc->add_option("--ns", ns_values, "Total scatterer counts")->delimiter(',');
    sc->add_option("--realizations", realizations, "Runs per count")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try
    {
        if (*crb)
            return cmd_crb(o, out);
        if (*run)
            return cmd_run(o, dump, out, err);
        if (*mc)
            return cmd_mc(o, out, err);
        if (*sp)
            return cmd_sweep_power(o, pb_values, out, err);
        if (*sr)
            return cmd_sweep_rho(o, rho_values, out);
        if (*sc)
            return cmd_scatterers(o, ns_values, realizations, out, err);
    }
    catch (const Error &e)
    {
        err << e.what() << '\n';
        return e.kind() == ErrorKind::WeakSignal ? kExitEstimation : kExitUsage;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace hrisloc
