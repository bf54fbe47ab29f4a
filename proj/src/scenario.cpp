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
#include "hrisloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hrisloc/errors.hpp"
#include "hrisloc/random.hpp"

namespace hrisloc {

namespace {

Position to_position(const std::array<double, 3> &a) { return {a[0], a[1], a[2]}; }

} // namespace

void RadioConfig::validate() const
{
    auto fail = [](const std::string &msg) { throw Error(ErrorKind::InvalidConfig, msg); };
    if (K < 1 || T < 1 || bs_rows < 1 || bs_cols < 1 || ris_rows < 1 || ris_cols < 1 || n_fft < 1)
        fail("counts must be >= 1");
    if (T % 2 != 0)
        throw Error(ErrorKind::OddT, "T must be even, got " + std::to_string(T));
    if (!(lambda > 0.0) || !(element_spacing > 0.0) || element_spacing > lambda / 2.0 * (1.0 + 1e-12))
        fail("element spacing must lie in (0, lambda/2]");
    if (!(delta_f > 0.0))
        fail("subcarrier spacing must be positive");
    if (!(rho > 0.0 && rho < 1.0))
        fail("rho must lie in (0, 1)");
    if (!(p_b >= 0.0) || !(noise_psd >= 0.0) || !(noise_figure > 0.0))
        fail("powers must be non-negative");
    if (n_fft < K)
        fail("FFT size must be at least K");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

std::pair<Scenario, RadioConfig> default_scenario()
{
    const ScenarioFile f;
    return {f.scenario(), f.radio()};
}

ScattererLists place_scatterers(int n_bu, int n_bru, std::uint64_t seed)
{
    if (n_bu < 0 || n_bru < 0)
        throw Error(ErrorKind::InvalidConfig, "scatterer counts must be >= 0");

    Rng rng(derive_seed(seed, {0x5c47}));
    auto draw = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    ScattererLists out;
    out.bu.reserve(static_cast<std::size_t>(n_bu));
    out.bru.reserve(static_cast<std::size_t>(n_bru));
    for (int i = 0; i < n_bu; ++i)
    {
        const double x = draw(-8.0, 8.0), y = draw(0.0, 3.0), z = draw(-5.0, 1.0);
        out.bu.emplace_back(x, y, z);
    }
    for (int j = 0; j < n_bru; ++j)
    {
        const double x = draw(2.5, 4.5), y = draw(4.0, 11.0), z = draw(-5.0, 1.0);
        out.bru.emplace_back(x, y, z);
    }
    return out;
}

double noise_variance(const RadioConfig &cfg) { return cfg.noise_psd * cfg.delta_f * cfg.noise_figure; }

Scenario ScenarioFile::scenario() const
{
    Scenario s;
    s.p_b = to_position(p_b);
    s.p_u = to_position(p_u);
    s.p_r = to_position(p_r);
    s.rot = {deg2rad(alpha_deg), deg2rad(beta_deg), deg2rad(gamma_deg)};
    s.b_r = b_r;
    s.b_u = b_u;
    for (const auto &p : scatterers_bu)
        s.scatterers_bu.push_back(to_position(p));
    for (const auto &p : scatterers_bru)
        s.scatterers_bru.push_back(to_position(p));
    s.rcs = rcs;
    return s;
}

RadioConfig ScenarioFile::radio() const
{
    RadioConfig c;
    c.lambda = lambda;
    c.element_spacing = element_spacing;
    c.K = K;
    c.T = T;
    c.delta_f = delta_f;
    c.p_b = dbm_to_watts(p_b_dbm);
    c.rho = rho;
    c.noise_psd = dbm_to_watts(noise_psd_dbm_hz);
    c.noise_figure = db_to_ratio(noise_figure_db);
    c.n_fft = n_fft;
    c.bs_rows = bs_rows;
    c.bs_cols = bs_cols;
    c.ris_rows = ris_rows;
    c.ris_cols = ris_cols;
    return c;
}

GainModel ScenarioFile::gains() const
{
    GainModel g;
    if (gain_model == "free_space")
        g.kind = GainModel::Kind::FreeSpace;
    else if (gain_model == "fixed")
        g.kind = GainModel::Kind::Fixed;
    else
        throw Error(ErrorKind::InvalidConfig, "gain_model must be free_space or fixed");
    g.fixed_br = fixed_gain_br;
    g.fixed_bu = fixed_gain_bu;
    g.fixed_bru = fixed_gain_bru;
    return g;
}

#define HRISLOC_FILE_FIELDS(X)                                                                                         \
    X(scenario_id)                                                                                                     \
    X(p_b)                                                                                                             \
    X(p_u)                                                                                                             \
    X(p_r)                                                                                                             \
    X(alpha_deg)                                                                                                       \
    X(beta_deg)                                                                                                        \
    X(gamma_deg)                                                                                                       \
    X(b_r)                                                                                                             \
    X(b_u)                                                                                                             \
    X(scatterers_bu)                                                                                                   \
    X(scatterers_bru)                                                                                                  \
    X(rcs)                                                                                                             \
    X(lambda)                                                                                                          \
    X(element_spacing)                                                                                                 \
    X(K)                                                                                                               \
    X(T)                                                                                                               \
    X(delta_f)                                                                                                         \
    X(p_b_dbm)                                                                                                         \
    X(rho)                                                                                                             \
    X(noise_psd_dbm_hz)                                                                                                \
    X(noise_figure_db)                                                                                                 \
    X(n_fft)                                                                                                           \
    X(bs_rows)                                                                                                         \
    X(bs_cols)                                                                                                         \
    X(ris_rows)                                                                                                        \
    X(ris_cols)                                                                                                        \
    X(gain_model)                                                                                                      \
    X(fixed_gain_br)                                                                                                   \
    X(fixed_gain_bu)                                                                                                   \
    X(fixed_gain_bru)

void to_json(nlohmann::json &j, const ScenarioFile &f)
{
    j = nlohmann::json::object();
#define X(name) j[#name] = f.name;
    HRISLOC_FILE_FIELDS(X)
#undef X
}

// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json &j, ScenarioFile &f)
{
    if (!j.is_object())
        throw Error(ErrorKind::InvalidConfig, "scenario file must be a JSON object");
    const auto keys = override_keys();
    for (const auto &item : j.items())
    {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
            throw Error(ErrorKind::InvalidConfig, "unknown scenario key '" + item.key() + "'");
    }
    try
    {
#define X(name)                                                                                                        \
    if (j.contains(#name))                                                                                             \
        j.at(#name).get_to(f.name);
        HRISLOC_FILE_FIELDS(X)
#undef X
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorKind::InvalidConfig, e.what());
    }
}

std::vector<std::string> override_keys()
{
    return {
#define X(name) #name,
        HRISLOC_FILE_FIELDS(X)
#undef X
    };
}

#undef HRISLOC_FILE_FIELDS

std::string dump_scenario_file(const ScenarioFile &f)
{
    nlohmann::json j = f;
    return j.dump(2) + "\n";
}

ScenarioFile parse_scenario_file(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw Error(ErrorKind::InvalidConfig, e.what());
    }
    ScenarioFile f;
    from_json(j, f);
    return f;
}

ScenarioFile load_scenario_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_file(ss.str());
}

void save_scenario_file(const ScenarioFile &f, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path);
    out << dump_scenario_file(f);
}

void apply_override(ScenarioFile &f, const std::string &assignment)
{
    const auto eq = assignment.find('=');
    const auto keys = override_keys();
    auto key_list = [&keys] {
        std::string s;
        for (const auto &k : keys)
            s += (s.empty() ? "" : ", ") + k;
        return s;
    };
    if (eq == std::string::npos || eq == 0)
        throw Error(ErrorKind::InvalidConfig, "override must be key=value; valid keys: " + key_list());

    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw Error(ErrorKind::InvalidConfig, "unknown override key '" + key + "'; valid keys: " + key_list());

    nlohmann::json parsed;
    try
    {
        parsed = nlohmann::json::parse(value);
    }
    catch (const nlohmann::json::parse_error &)
    {
        parsed = value;
    }
    nlohmann::json j = f;
    j[key] = parsed;
    ScenarioFile updated;
    from_json(j, updated);
    f = std::move(updated);
}

} // namespace hrisloc
