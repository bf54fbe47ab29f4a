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
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "hrisloc/estimator.hpp"
#include "hrisloc/fim.hpp"
#include "hrisloc/scenario.hpp"
#include "hrisloc/signal.hpp"

namespace hrisloc {

enum class SweepVariable { PB_dBm, Rho, NScatterers };

const char *to_string(SweepVariable v);

struct SweepSpec
{
    SweepVariable variable = SweepVariable::PB_dBm;
    std::vector<double> values;
    int trials = 1;
    std::uint64_t base_seed = 1;
    // false: schedule and gain phases fixed per sweep point, only noise varies.
    bool redraw_per_trial = false;
};

// One value per metric, ordered as BoundReport::names().
using MetricArray = std::array<double, BoundReport::kCount>;

struct MetricRow
{
    double value = 0.0;
    MetricArray rmse{};
    MetricArray crb{};
    int trials = 0;
    int failures = 0;
};

struct Truth
{
    Scenario scenario;
    ChannelParams channel;
};

// Squared error of every metric: TOAs in metres, angle pairs as wrapped
// (az, el) norms, rotation in Frobenius norm.
MetricArray squared_errors(const EstimateResult &est, const Truth &truth);

// Bounds with singular information mapped to +inf instead of throwing;
// all zero when the noise variance is zero.
BoundReport bounds_or_inf(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                          const ChannelParams &params);

// Worker count: HRISLOC_THREADS if set, otherwise hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads.
void parallel_for(int n, const std::function<void(int)> &body);

std::vector<MetricRow> monte_carlo(const Scenario &s, const RadioConfig &cfg, const GainModel &gains,
                                   const SweepSpec &spec, const EstimatorConfig &ec = {});

std::vector<BoundReport> rho_sweep_bounds(const Scenario &s, const RadioConfig &cfg, const CodebookSchedule &sched,
                                          const ChannelParams &params, const std::vector<double> &rho_values);

// Error quantiles over scatterer realisations for one N_s.
struct QuantileRow
{
    int n_scatterers = 0;
    int runs = 0;
    int failures = 0;
    // p_R [m], p_U [m], b_R [s], b_U [s], R [Frobenius]
    std::array<double, 5> median{};
    std::array<double, 5> p90{};
    static const std::array<const char *, 5> &names();
};

// N_s scatterers split as N_s / 2 on the BS-UE side and the rest on the
// HRIS-UE side; each realisation draws placement, gains and noise.
std::vector<QuantileRow> scatterer_study(const Scenario &s, const RadioConfig &cfg, const GainModel &gains,
                                         const std::vector<int> &n_values, int realizations, std::uint64_t base_seed,
                                         const EstimatorConfig &ec = {});

// Linear-interpolated quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> v, double q);

void write_metric_csv(std::ostream &out, SweepVariable variable, const std::vector<MetricRow> &rows);
void write_quantile_csv(std::ostream &out, const std::vector<QuantileRow> &rows);
std::string metric_csv_header(SweepVariable variable);

} // namespace hrisloc
