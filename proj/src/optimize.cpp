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
#include "hrisloc/optimize.hpp"

#include <cmath>

namespace hrisloc {

NewtonResult newton_minimize(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &x0,
                             const NewtonOptions &opt)
{
    const Eigen::Index n = x0.size();
    const double h = opt.fd_step;

    NewtonResult r;
    r.x = x0;
    r.f_init = f(x0);
    double fx = r.f_init;

    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);
    for (int it = 0; it < opt.max_iter; ++it)
    {
        for (Eigen::Index i = 0; i < n; ++i)
        {
            Eigen::VectorXd xp = r.x, xm = r.x;
            xp(i) += h;
            xm(i) -= h;
            const double fp = f(xp), fm = f(xm);
            g(i) = (fp - fm) / (2.0 * h);
            H(i, i) = (fp - 2.0 * fx + fm) / (h * h);
        }
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
            {
                Eigen::VectorXd x = r.x;
                x(i) += h;
                x(j) += h;
                const double fpp = f(x);
                x(j) -= 2.0 * h;
                const double fpm = f(x);
                x(i) -= 2.0 * h;
                const double fmm = f(x);
                x(j) += 2.0 * h;
                const double fmp = f(x);
                H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        Eigen::VectorXd lam = es.eigenvalues().cwiseAbs();
        const double floor = std::max(1e-12 * lam.maxCoeff(), 1e-300);
        lam = lam.cwiseMax(floor);
        Eigen::VectorXd step = -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(lam);

        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k)
        {
            const Eigen::VectorXd xn = r.x + step;
            const double fn = f(xn);
            if (fn <= fx)
            {
                r.x = xn;
                fx = fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        r.iterations = it + 1;
        if (!accepted || step.norm() < opt.tol)
        {
            r.converged = true;
            break;
        }
    }
    r.f_final = fx;
    return r;
}

} // namespace hrisloc
