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

#ifndef BOSONSIM_OPTIMIZE_H
#define BOSONSIM_OPTIMIZE_H

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace bosonsim {

struct OptimizeResult {
    Eigen::VectorXd x;
    double value = 0;
    size_t iterations = 0;
    bool converged = false;
};

struct DifferentialEvolutionOptions {
    size_t population = 0;  // 0 picks 10 * dimension, at least 20
    size_t generations = 400;
    double differential_weight = 0.7;
    double crossover = 0.9;
    uint64_t seed = 0;
    /// Stop early once the best value is at or below this.
    double target = 0;
};

/// DE/rand/1/bin over the box [lower, upper]. Trial vectors are clipped to the box.
OptimizeResult differential_evolution(
    const std::function<double(const Eigen::VectorXd &)> &objective, const Eigen::VectorXd &lower,
    const Eigen::VectorXd &upper, const DifferentialEvolutionOptions &options = {});

struct LevenbergMarquardtOptions {
    size_t max_iterations = 200;
    double gradient_tolerance = 1e-15;
    double step_tolerance = 1e-15;
    /// Stop once 1/2 |r|^2 falls to this value.
    double cost_target = 0;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;
using JacobianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd &)>;

/// Minimizes 1/2 |r(x)|^2 with Nielsen's damping update. Without `jacobian`, central
/// differences are used. `value` in the result is 1/2 |r|^2.
OptimizeResult levenberg_marquardt(
    const ResidualFunction &residual, const Eigen::VectorXd &x0, const LevenbergMarquardtOptions &options = {},
    const JacobianFunction &jacobian = {});

}  // namespace bosonsim

#endif
