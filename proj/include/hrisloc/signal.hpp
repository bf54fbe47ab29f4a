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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hrisloc/geometry.hpp"
#include "hrisloc/scenario.hpp"

namespace hrisloc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Uniform planar array. Element (r, c) sits at flat index r * cols + c.
struct ArrayGeometry
{
    int rows = 1;
    int cols = 1;
    double spacing = 0.0; // m
    double lambda = 1.0;  // m

    int size() const { return rows * cols; }
};

ArrayGeometry bs_array(const RadioConfig &cfg);
ArrayGeometry ris_array(const RadioConfig &cfg);

// a(psi) = a_r (x) a_c with
// [a_r]_n = exp(-j 2 pi n d / lambda sin(el) cos(az)), [a_c]_n = exp(-j 2 pi n d / lambda cos(el)).
CVec steering(const ArrayGeometry &g, const AnglePair &psi);

struct SteeringJet
{
    CVec a;
    CVec d_az;
    CVec d_el;
};

// Steering vector with its partial derivatives in azimuth and elevation.
SteeringJet steering_jet(const ArrayGeometry &g, const AnglePair &psi);

// [d]_k = exp(-j 2 pi k delta_f tau), k = 0..K-1.
CVec delay_steering(double tau, int K, double delta_f);

// One unmodelled scattering path seen at the UE.
struct ScatterPath
{
    double tau = 0.0;  // s
    AnglePair angle;   // BS frame for BS-SP-UE, HRIS frame for BS-HRIS-SP-UE
    cplx gain{0.0, 0.0};
};

struct ChannelParams
{
    double tau_br = 0.0;
    double tau_bu = 0.0;
    double tau_bru = 0.0;
    AnglePair theta_br;
    AnglePair theta_bu;
    AnglePair theta_ru;
    AnglePair phi_rb;
    cplx g_br{0.0, 0.0};
    cplx g_bu{0.0, 0.0};
    cplx g_bru{0.0, 0.0};
    std::vector<ScatterPath> bsu;
    std::vector<ScatterPath> brsu;
};

// Delays, angles and gains of every path. Gain phases and scatterer gains
// are drawn from `seed`; magnitudes follow `gains` (free space or fixed)
// and the radar equation for scatterers.
ChannelParams channel_params_from_scenario(const Scenario &s, const RadioConfig &cfg, const GainModel &gains,
                                           std::uint64_t seed);

// Precoders f_t (M_B x T), HRIS combiners c_t (M_R x T) and reflection
// profiles gamma_t (M_R x T).
struct CodebookSchedule
{
    CMat f;
    CMat c;
    CMat gamma;

    int T() const { return static_cast<int>(f.cols()); }
};

// f: unit-norm 2D DFT beams, f_{2t} = f_{2t+1}, beam (t / 2) mod M_B.
// c: unit-modulus 2D DFT beams, spread over the M_R columns.
// gamma: random unit-modulus phases, gamma_{2t+1} = -gamma_{2t}.
CodebookSchedule build_schedule(const RadioConfig &cfg, std::uint64_t seed);

struct ObservationSet
{
    CMat y_r; // K x T, HRIS sensing branch
    CMat y_u; // K x T, UE
};

// Per-snapshot scalar factors of the three modelled paths, so that
// mu_R[:, t] = g_br sqrt(rho P) d(tau_br) s_r[t], and similarly for the UE paths.
struct PathFactors
{
    CVec s_r;   // (c_t^T a_R(phi_rb)) (a_B^T(theta_br) f_t)
    CVec s_bu;  // a_B^T(theta_bu) f_t
    CVec s_bru; // a_R^T(theta_ru) diag(gamma_t) a_R(phi_rb) a_B^T(theta_br) f_t
};

PathFactors path_factors(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &p);

ObservationSet noiseless_observations(const RadioConfig &cfg, const CodebookSchedule &sched,
                                      const ChannelParams &params);

// Noiseless mean plus circular Gaussian noise of variance noise_variance(cfg)
// per entry, independent between the two receivers.
ObservationSet synthesize(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params,
                          std::uint64_t noise_seed);

// Binary dump: "HRISOBS1", u32 K, u32 T, then Y_R and Y_U as row-major
// little-endian f64 (re, im) pairs.
void write_observations(const ObservationSet &obs, const std::string &path);
ObservationSet read_observations(const std::string &path);

} // namespace hrisloc
