// Copyright 2026 The BosonSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bosonsim/optimize.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bosonsim/rng.h"

namespace bosonsim {

OptimizeResult differential_evolution(
    const std::function<double(const Eigen::VectorXd &)> &objective, const Eigen::VectorXd &lower,
    const Eigen::VectorXd &upper, const DifferentialEvolutionOptions &options) {
    const Eigen::Index dim = lower.size();
    if (upper.size() != dim || dim == 0) {
        throw std::invalid_argument("differential_evolution bounds must be non-empty and equal length");
    }
    size_t pop = options.population ? options.population : std::max<size_t>(20, 10 * static_cast<size_t>(dim));
    if (pop < 4) {
        throw std::invalid_argument("differential_evolution needs a population of at least 4");
    }
    CounterRng rng(options.seed);
    auto pick = [&](size_t bound) { return static_cast<size_t>(rng.uniform() * static_cast<double>(bound)); };

    std::vector<Eigen::VectorXd> members(pop, Eigen::VectorXd(dim));
    std::vector<double> values(pop);
    for (size_t p = 0; p < pop; ++p) {
        for (Eigen::Index d = 0; d < dim; ++d) {
            members[p](d) = lower(d) + rng.uniform() * (upper(d) - lower(d));
        }
        values[p] = objective(members[p]);
    }
    size_t best = static_cast<size_t>(std::min_element(values.begin(), values.end()) - values.begin());

    OptimizeResult result;
    size_t gen = 0;
    for (; gen < options.generations && values[best] > options.target; ++gen) {
        for (size_t p = 0; p < pop; ++p) {
            size_t a, b, c;
            do {
                a = pick(pop);
            } while (a == p);
            do {
                b = pick(pop);
            } while (b == p || b == a);
            do {
                c = pick(pop);
            } while (c == p || c == a || c == b);
            Eigen::VectorXd trial = members[p];
            auto forced = static_cast<Eigen::Index>(pick(static_cast<size_t>(dim)));
            for (Eigen::Index d = 0; d < dim; ++d) {
                if (d == forced || rng.uniform() < options.crossover) {
                    double v = members[a](d) + options.differential_weight * (members[b](d) - members[c](d));
                    trial(d) = std::clamp(v, lower(d), upper(d));
                }
            }
            double f = objective(trial);
            if (f <= values[p]) {
                members[p] = std::move(trial);
                values[p] = f;
                if (f < values[best]) {
                    best = p;
                }
            }
        }
    }
    result.x = members[best];
    result.value = values[best];
    result.iterations = gen;
    result.converged = values[best] <= options.target;
    return result;
}

namespace {

Eigen::MatrixXd central_difference(const ResidualFunction &residual, const Eigen::VectorXd &x, Eigen::Index m) {
    Eigen::MatrixXd jac(m, x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        double h = 1e-7 * std::max(1.0, std::abs(x(k)));
        probe(k) = x(k) + h;
        Eigen::VectorXd up = residual(probe);
        probe(k) = x(k) - h;
        Eigen::VectorXd down = residual(probe);
        probe(k) = x(k);
        jac.col(k) = (up - down) / (2 * h);
    }
    return jac;
}

}  // namespace

OptimizeResult levenberg_marquardt(
    const ResidualFunction &residual, const Eigen::VectorXd &x0, const LevenbergMarquardtOptions &options,
    const JacobianFunction &jacobian) {
    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = residual(x);
    auto jac_at = [&](const Eigen::VectorXd &at) {
        return jacobian ? jacobian(at) : central_difference(residual, at, r.size());
    };
    double cost = 0.5 * r.squaredNorm();
    Eigen::MatrixXd j = jac_at(x);
    Eigen::MatrixXd a = j.transpose() * j;
    Eigen::VectorXd g = j.transpose() * r;
    double mu = 1e-3 * std::max(1e-12, a.diagonal().maxCoeff());
    double nu = 2;

    OptimizeResult result;
    size_t it = 0;
    bool converged = cost <= options.cost_target;
    for (; it < options.max_iterations && !converged; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            converged = true;
            break;
        }
        Eigen::MatrixXd damped = a;
        damped.diagonal().array() += mu;
        Eigen::VectorXd h = damped.ldlt().solve(-g);
        if (h.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
            converged = true;
            break;
        }
        Eigen::VectorXd x_new = x + h;
        Eigen::VectorXd r_new = residual(x_new);
        double cost_new = 0.5 * r_new.squaredNorm();
        double predicted = 0.5 * h.dot(mu * h - g);
        double rho = predicted > 0 ? (cost - cost_new) / predicted : -1;
        if (rho > 0 && std::isfinite(cost_new)) {
            x = std::move(x_new);
            r = std::move(r_new);
            cost = cost_new;
            j = jac_at(x);
            a = j.transpose() * j;
            g = j.transpose() * r;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2 * rho - 1, 3));
            nu = 2;
            converged = cost <= options.cost_target;
        } else {
            mu *= nu;
            nu *= 2;
            if (!std::isfinite(mu)) {
                break;
            }
        }
    }
    result.x = std::move(x);
    result.value = cost;
    result.iterations = it;
    result.converged = converged;
    return result;
}

}  // namespace bosonsim
