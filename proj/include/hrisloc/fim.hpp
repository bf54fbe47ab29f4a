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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hrisloc/errors.hpp"
#include "hrisloc/geometry.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

namespace hrisloc {

inline constexpr int kChannelDim = 17; // eta (11) + gains (6)
inline constexpr int kEtaDim = 11;
inline constexpr int kStateDim = 17;

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Channel parameter order:
//  0 tau_br, 1 tau_bu, 2 tau_bru,
//  3-4 theta_br (az, el), 5-6 theta_bu, 7-8 theta_ru, 9-10 phi_rb,
//  11-12 Re/Im g_br, 13-14 Re/Im g_bu, 15-16 Re/Im g_bru.
namespace idx {
inline constexpr int tau_br = 0, tau_bu = 1, tau_bru = 2;
inline constexpr int theta_br = 3, theta_bu = 5, theta_ru = 7, phi_rb = 9;
inline constexpr int g_br = 11, g_bu = 13, g_bru = 15;
// State order: p_R (0-2), p_U (3-5), b_R, b_U, r1, r2, r3 (8-16).
inline constexpr int p_r = 0, p_u = 3, b_r = 6, b_u = 7, rot = 8;
} // namespace idx

VecX channel_vector(const ChannelParams &p);
ChannelParams with_channel_vector(ChannelParams p, const VecX &zeta);

// State vector [p_R; p_U; b_R; b_U; r1; r2; r3] of a scenario.
VecX state_vector(const Scenario &s);

// d mu / d zeta_i for both receivers, K x T each.
struct MeanDerivative
{
    CMat d_r;
    CMat d_u;
};

// Analytic derivatives of the noiseless mean (scatterers are not modelled).
std::vector<MeanDerivative> mean_derivatives(const RadioConfig &cfg, const CodebookSchedule &sched,
                                             const ChannelParams &params);

// J = 2 / sigma^2 sum Re{d mu d mu^H} over both receivers. Throws InvalidConfig for sigma^2 = 0.
MatX channel_fim(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params);

// Channel FIM at P_B = 1 and sigma^2 = 1; channel_fim = (P_B / sigma^2) times this.
MatX unit_snr_channel_fim(const RadioConfig &cfg, const CodebookSchedule &sched, const ChannelParams &params);

// Inverse of a symmetric positive definite matrix through the eigendecomposition
// of its diagonally equilibrated form. Eigenvalues below 1e-12 times the largest
// raise SingularMatrixError of the given kind.
MatX invert_spd(const MatX &m, ErrorKind kind);

// J_eta = ([J^-1]_{0:11, 0:11})^-1. Throws SingularFIM.
MatX efim_channel(const MatX &j);

// d eta / d zeta_s, 11 x 17. Throws DegenerateGeometry.
MatX jacobian_T(const Scenario &s);

// T^T J_eta T.
MatX state_fim(const MatX &j_eta, const MatX &t);

// blkdiag(I_8, Phi_0 / sqrt 2), 17 x 11, spanning the tangent space of the
// orthogonality constraint at r.
MatX constraint_basis(const Rotation &r);

// Which state blocks are treated as known when forming the bound.
struct Knowledge
{
    bool p_r = false;
    bool p_u = false;
    bool rot = false;
};

enum class KnowledgeCase { C1, C2, C3, C4, C5, C6 };

// C1 all unknown; C2 p_U, R known; C3 R known; C4 p_U known; C5 p_R, R known; C6 p_R known.
Knowledge knowledge_for(KnowledgeCase c);

// Phi (Phi^T J Phi)^-1 Phi^T. Known blocks are removed from J and Phi first
// and come back as zero rows/columns. Throws SingularReducedFIM.
MatX constrained_crb(const MatX &j_s, const Rotation &r, const Knowledge &known = {});

struct BoundReport
{
    double teb_br = 0.0; // m
    double teb_bu = 0.0;
    double teb_bru = 0.0;
    double adeb_br = 0.0; // rad
    double adeb_bu = 0.0;
    double adeb_ru = 0.0;
    double aaeb_rb = 0.0;
    double peb_r = 0.0; // m
    double peb_u = 0.0;
    double ceb_r = 0.0; // s
    double ceb_u = 0.0;
    double oeb = 0.0;

    static constexpr int kCount = 12;
    std::array<double, kCount> values() const;
    static const std::array<const char *, kCount> &names();
};

BoundReport extract_bounds(const MatX &c, const MatX &j_eta);

// Every bound multiplied by factor.
BoundReport scale_bounds(const BoundReport &b, double factor);

// Full chain from scenario to bounds. The inversions run at unit SNR and the
// result is scaled by sqrt(sigma^2 / P_B), so bounds scale exactly with power.
BoundReport compute_bounds(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                           const ChannelParams &params, const Knowledge &known = {});

// CSV header and row: scenario_id, P_B_dBm, rho, then the twelve bounds.
std::string bound_csv_header();
std::string bound_csv_row(const std::string &scenario_id, double p_b_dbm, double rho, const BoundReport &b);

// %.17g formatting shared by all CSV writers.
std::string format_double(double v);

} // namespace hrisloc
