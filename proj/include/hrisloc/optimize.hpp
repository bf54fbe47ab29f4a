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

#include <functional>

#include <Eigen/Dense>

namespace hrisloc {

struct NewtonOptions
{
    double tol = 1e-10;    // stop when the accepted step norm falls below this
    int max_iter = 50;
    double fd_step = 1e-7; // central-difference step
    int max_halvings = 40;
};

struct NewtonResult
{
    Eigen::VectorXd x;
    double f_init = 0.0;
    double f_final = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton minimisation with central finite-difference gradient and
// Hessian. Indefinite Hessians are made positive by taking absolute
// eigenvalues; steps are halved until the objective does not increase.
// f_final <= f_init always holds.
NewtonResult newton_minimize(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &x0,
                             const NewtonOptions &opt = {});

} // namespace hrisloc
