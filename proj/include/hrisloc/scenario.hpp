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
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrisloc/geometry.hpp"

namespace hrisloc {

// Ground truth: node positions, HRIS orientation, clock biases, scattering points.
struct Scenario
{
    Position p_b = Position::Zero();
    Position p_u = Position::Zero();
    Position p_r = Position::Zero();
    RotationAngles rot;
    double b_r = 0.0; // s
    double b_u = 0.0; // s
    std::vector<Position> scatterers_bu;
    std::vector<Position> scatterers_bru;
    double rcs = 1.0; // m^2

    Rotation rotation() const { return rotation_from_angles(rot); }
};

// Waveform, array and power parameters, SI units throughout.
struct RadioConfig
{
    double lambda = 0.01;            // m
    double element_spacing = 0.0025; // m
    int K = 128;                     // subcarriers
    int T = 100;                     // transmissions, even
    double delta_f = 120e3;          // Hz
    double p_b = 1.0;                // W, per subcarrier
    double rho = 0.5;                // sensing fraction
    double noise_psd = 0.0;          // W/Hz
    double noise_figure = 1.0;       // linear power ratio
    int n_fft = 4048;
    int bs_rows = 4;
    int bs_cols = 4;
    int ris_rows = 16;
    int ris_cols = 16;

    int bs_elements() const { return bs_rows * bs_cols; }
    int ris_elements() const { return ris_rows * ris_cols; }

    // Throws InvalidConfig / OddT on violated invariants.
    void validate() const;
};

// Magnitude model for the three line-of-sight gains.
struct GainModel
{
    enum class Kind { FreeSpace, Fixed };
    Kind kind = Kind::FreeSpace;
    double fixed_br = 1.0;
    double fixed_bu = 1.0;
    double fixed_bru = 1.0;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_ratio(double db);

std::pair<Scenario, RadioConfig> default_scenario();

struct ScattererLists
{
    std::vector<Position> bu;
    std::vector<Position> bru;
};

// Uniform placement inside the two boxes used for the scatterer study:
// BS-UE points in [-8,8]x[0,3]x[-5,1], HRIS-UE points in [2.5,4.5]x[4,11]x[-5,1].
ScattererLists place_scatterers(int n_bu, int n_bru, std::uint64_t seed);

// sigma^2 = N0 * delta_f * noise figure, per subcarrier and snapshot.
double noise_variance(const RadioConfig &cfg);

// File-level description of a run. Values are held in the units the JSON file
// uses (degrees, dBm, dB) so that load/save is lossless; scenario(), radio()
// and gains() perform the one conversion into SI.
struct ScenarioFile
{
    std::string scenario_id = "default";
    std::array<double, 3> p_b{0.0, 0.0, 0.0};
    std::array<double, 3> p_u{5.0, 2.0, 1.0};
    std::array<double, 3> p_r{2.0, 12.0, 3.0};
    double alpha_deg = 20.0;
    double beta_deg = 15.0;
    double gamma_deg = 10.0;
    double b_r = 10e-9;
    double b_u = 20e-9;
    std::vector<std::array<double, 3>> scatterers_bu;
    std::vector<std::array<double, 3>> scatterers_bru;
    double rcs = 1.0;

    double lambda = 0.01;
    double element_spacing = 0.0025;
    int K = 128;
    int T = 100;
    double delta_f = 120e3;
    double p_b_dbm = 30.0;
    double rho = 0.5;
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 5.0;
    int n_fft = 4048;
    int bs_rows = 4;
    int bs_cols = 4;
    int ris_rows = 16;
    int ris_cols = 16;

    std::string gain_model = "free_space"; // or "fixed"
    double fixed_gain_br = 1.0;
    double fixed_gain_bu = 1.0;
    double fixed_gain_bru = 1.0;

    Scenario scenario() const;
    RadioConfig radio() const;
    GainModel gains() const;
};

void to_json(nlohmann::json &j, const ScenarioFile &f);
void from_json(const nlohmann::json &j, ScenarioFile &f);

ScenarioFile load_scenario_file(const std::string &path);
void save_scenario_file(const ScenarioFile &f, const std::string &path);
std::string dump_scenario_file(const ScenarioFile &f);
ScenarioFile parse_scenario_file(const std::string &text);

// Names accepted by apply_override (the top-level JSON keys).
std::vector<std::string> override_keys();

// Applies "key=value"; the value is parsed as JSON, falling back to a string.
// Throws InvalidConfig listing the valid keys when the key is unknown.
void apply_override(ScenarioFile &f, const std::string &assignment);

} // namespace hrisloc
