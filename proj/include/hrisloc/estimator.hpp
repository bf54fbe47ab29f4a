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

#include <string>
#include <vector>

#include "hrisloc/errors.hpp"
#include "hrisloc/geometry.hpp"
#include "hrisloc/optimize.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

namespace hrisloc {

struct EstimatorConfig
{
    int bs_hris_grid = 32;     // points per angle per dimension, level 0
    int bs_hris_refine_grid = 8;
    int refine_levels = 2;
    double refine_shrink = 8.0;
    int ue_grid = 64;
    NewtonOptions newton;
    double weak_factor = 3.0;
    bool check_weak = true;

    // Half-plane of the azimuth search: +1 for (0, pi), -1 for (-pi, 0),
    // 0 for the full circle. A planar array cannot tell the two sides of
    // its own plane apart; the default BS faces +y and the HRIS faces its
    // local -y axis.
    int bs_facing = +1;
    int ris_facing = -1;
};

struct StageDiagnostics
{
    std::string stage;
    double objective_init = 0.0;
    double objective_final = 0.0;
    int iterations = 0;
    double peak = 0.0;        // grid correlation maximum
    double noise_floor = 0.0; // median + 1.4826 MAD of grid correlations
};

struct TriangleSolution
{
    Position p_r = Position::Zero();
    Position p_u = Position::Zero();
    double b_r = 0.0;
    double b_u = 0.0;
    double d_br = 0.0;
    double d_bu = 0.0;
};

struct EstimateResult
{
    ChannelParams channel;
    Position p_r = Position::Zero();
    Position p_u = Position::Zero();
    double b_r = 0.0;
    double b_u = 0.0;
    Rotation r;
    std::vector<StageDiagnostics> diagnostics;
};

// A failure inside run_pipeline, tagged with the stage and carrying every
// estimate produced before it.
class PipelineError : public Error
{
public:
    PipelineError(const Error &cause, std::string stage, EstimateResult partial);

    const std::string &stage() const noexcept { return stage_; }
    const EstimateResult &partial() const noexcept { return partial_; }

private:
    std::string stage_;
    EstimateResult partial_;
};

// argmax_tau sum_t |d(tau)^H y_t|^2 over [0, 1/delta_f): zero-padded FFT of
// size n_fft, quadratic interpolation, then Newton ascent.
double estimate_toa(const CMat &y, const RadioConfig &cfg);

// sum_t |d(tau)^H y_t|^2
double toa_objective(const CMat &y, double tau, double delta_f);

struct BsHrisEstimate
{
    AnglePair theta_br;
    AnglePair phi_rb;
    cplx g_br;
    StageDiagnostics diag;
};

BsHrisEstimate estimate_bs_hris_angles(const CMat &y_r, const CodebookSchedule &sched, const RadioConfig &cfg,
                                       double tau_hat, const EstimatorConfig &ec = {});

struct SeparatedPaths
{
    CMat z_bu;  // columns 2t + (2t+1)
    CMat z_bru; // columns 2t - (2t+1)
};

SeparatedPaths separate_paths(const CMat &y_u);

struct PathEstimate
{
    double tau = 0.0;
    AnglePair angle;
    cplx gain;
    StageDiagnostics diag;
};

PathEstimate estimate_bu(const CMat &z_bu, const CodebookSchedule &sched, const RadioConfig &cfg,
                         const EstimatorConfig &ec = {});

PathEstimate estimate_bru(const CMat &z_bru, const CodebookSchedule &sched, const RadioConfig &cfg,
                          const AnglePair &theta_br_hat, const AnglePair &phi_rb_hat, const EstimatorConfig &ec = {});

// Law-of-sines triangulation. Throws DegenerateTriangle.
TriangleSolution solve_positions_and_clocks(const ChannelParams &est, const Position &p_b);

// Orthogonal Procrustes fit of the HRIS local directions to the global ones.
// Throws DegenerateDirections.
Rotation estimate_rotation(const AnglePair &phi_rb_hat, const AnglePair &theta_ru_hat, const Position &p_r_hat,
                           const Position &p_u_hat, const Position &p_b);

// Procrustes objective ||Q - R Theta||_F^2 for the same inputs.
double rotation_objective(const Rotation &r, const AnglePair &phi_rb_hat, const AnglePair &theta_ru_hat,
                          const Position &p_r_hat, const Position &p_u_hat, const Position &p_b);

// All stages in order. Throws PipelineError.
EstimateResult run_pipeline(const ObservationSet &obs, const CodebookSchedule &sched, const RadioConfig &cfg,
                            const Position &p_b, const EstimatorConfig &ec = {});

} // namespace hrisloc
