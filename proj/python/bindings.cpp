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
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hrisloc/errors.hpp"
#include "hrisloc/estimator.hpp"
#include "hrisloc/experiment.hpp"
#include "hrisloc/fim.hpp"
#include "hrisloc/random.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace hrisloc;

namespace {

struct Setup
{
    ScenarioFile file;
    Scenario scenario;
    RadioConfig cfg;
    GainModel gains;
    CodebookSchedule sched;
    ChannelParams params;
};

Setup make_setup(const std::optional<std::string> &scenario_json, const std::vector<std::string> &overrides,
                 std::uint64_t seed)
{
    Setup s;
    if (scenario_json)
        s.file = parse_scenario_file(*scenario_json);
    for (const auto &kv : overrides)
        apply_override(s.file, kv);
    s.scenario = s.file.scenario();
    s.cfg = s.file.radio();
    s.cfg.validate();
    s.gains = s.file.gains();
    s.sched = build_schedule(s.cfg, derive_seed(seed, {0x5c4e}));
    s.params = channel_params_from_scenario(s.scenario, s.cfg, s.gains, derive_seed(seed, {0x9a15}));
    return s;
}

py::dict bounds_dict(const BoundReport &b)
{
    py::dict d;
    const auto v = b.values();
    for (int i = 0; i < BoundReport::kCount; ++i)
        d[BoundReport::names()[i]] = v[i];
    return d;
}

py::dict pair_dict(const AnglePair &a)
{
    py::dict d;
    d["azimuth"] = a.azimuth;
    d["elevation"] = a.elevation;
    return d;
}

py::dict channel_dict(const ChannelParams &p)
{
    py::dict d;
    d["tau_br"] = p.tau_br;
    d["tau_bu"] = p.tau_bu;
    d["tau_bru"] = p.tau_bru;
    d["theta_br"] = pair_dict(p.theta_br);
    d["theta_bu"] = pair_dict(p.theta_bu);
    d["theta_ru"] = pair_dict(p.theta_ru);
    d["phi_rb"] = pair_dict(p.phi_rb);
    d["g_br"] = p.g_br;
    d["g_bu"] = p.g_bu;
    d["g_bru"] = p.g_bru;
    return d;
}

KnowledgeCase parse_case(const std::string &name)
{
    static const char *names[] = {"C1", "C2", "C3", "C4", "C5", "C6"};
    for (int i = 0; i < 6; ++i)
        if (name == names[i])
            return static_cast<KnowledgeCase>(i);
    throw Error(ErrorKind::InvalidConfig, "knowledge case must be one of C1..C6, got '" + name + "'");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Joint user and hybrid-RIS localization: bounds, synthesis and estimation";

    py::register_exception<Error>(m, "HrislocError", PyExc_RuntimeError);

    m.def(
        "default_scenario_json", [] { return dump_scenario_file(ScenarioFile{}); },
        "Default scenario as a JSON document.");
    m.def("override_keys", &override_keys, "Keys accepted in scenario files and overrides.");

    m.def(
        "compute_bounds",
        [](std::optional<std::string> scenario_json, std::vector<std::string> overrides, std::uint64_t seed,
           const std::string &knowledge) {
            const Setup s = make_setup(scenario_json, overrides, seed);
            return bounds_dict(compute_bounds(s.scenario, s.cfg, s.sched, s.params, knowledge_for(parse_case(knowledge))));
        },
        py::arg("scenario_json") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = 1, py::arg("knowledge") = "C1",
        "Error bounds for one scenario; keys follow the bound CSV columns.");

    m.def(
        "rho_sweep",
        [](std::vector<double> rhos, std::optional<std::string> scenario_json, std::vector<std::string> overrides,
           std::uint64_t seed) {
            const Setup s = make_setup(scenario_json, overrides, seed);
            py::list out;
            for (const auto &b : rho_sweep_bounds(s.scenario, s.cfg, s.sched, s.params, rhos))
                out.append(bounds_dict(b));
            return out;
        },
        py::arg("rhos"), py::arg("scenario_json") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = 1);

    m.def(
        "channel_params",
        [](std::optional<std::string> scenario_json, std::vector<std::string> overrides, std::uint64_t seed) {
            return channel_dict(make_setup(scenario_json, overrides, seed).params);
        },
        py::arg("scenario_json") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = 1);

    m.def(
        "synthesize",
        [](std::optional<std::string> scenario_json, std::vector<std::string> overrides, std::uint64_t seed,
           bool noiseless) {
            const Setup s = make_setup(scenario_json, overrides, seed);
            const ObservationSet obs = noiseless ? noiseless_observations(s.cfg, s.sched, s.params)
                                                 : synthesize(s.cfg, s.sched, s.params, derive_seed(seed, {0x4015e}));
            return py::make_tuple(obs.y_r, obs.y_u);
        },
        py::arg("scenario_json") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = 1, py::arg("noiseless") = false, "Observations (y_r, y_u), each K x T complex.");

    m.def(
        "estimate",
        [](std::optional<std::string> scenario_json, std::vector<std::string> overrides, std::uint64_t seed,
           bool noiseless) {
            const Setup s = make_setup(scenario_json, overrides, seed);
            const ObservationSet obs = noiseless ? noiseless_observations(s.cfg, s.sched, s.params)
                                                 : synthesize(s.cfg, s.sched, s.params, derive_seed(seed, {0x4015e}));
            const EstimateResult e = run_pipeline(obs, s.sched, s.cfg, s.scenario.p_b);
            py::dict d;
            d["channel"] = channel_dict(e.channel);
            d["p_r"] = Vec3(e.p_r);
            d["p_u"] = Vec3(e.p_u);
            d["b_r"] = e.b_r;
            d["b_u"] = e.b_u;
            d["rotation"] = Mat3(e.r.matrix());
            return d;
        },
        py::arg("scenario_json") = py::none(), py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = 1, py::arg("noiseless") = false, "Run the estimation pipeline on one observation.");

    m.def(
        "sweep_power_csv",
        [](std::vector<double> values, int trials, std::optional<std::string> scenario_json,
           std::vector<std::string> overrides, std::uint64_t seed) {
            const Setup s = make_setup(scenario_json, overrides, seed);
            SweepSpec spec;
            spec.values = std::move(values);
            spec.trials = trials;
            spec.base_seed = seed;
            std::vector<MetricRow> rows;
            {
                py::gil_scoped_release release;
                rows = monte_carlo(s.scenario, s.cfg, s.gains, spec);
            }
            std::ostringstream out;
            write_metric_csv(out, spec.variable, rows);
            return out.str();
        },
        py::arg("values"), py::arg("trials") = 100, py::arg("scenario_json") = py::none(),
        py::arg("overrides") = std::vector<std::string>{}, py::arg("seed") = 1,
        "Monte Carlo RMSE and bounds over transmit powers, as metric CSV text.");

    m.def(
        "steering",
        [](int rows, int cols, double spacing, double lambda, double azimuth, double elevation) {
            return steering(ArrayGeometry{rows, cols, spacing, lambda}, AnglePair{azimuth, elevation});
        },
        py::arg("rows"), py::arg("cols"), py::arg("spacing"), py::arg("lam"), py::arg("azimuth"),
        py::arg("elevation"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
