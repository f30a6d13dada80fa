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

#include <gtest/gtest.h>

#include <cmath>

using namespace bosonsim;

TEST(differential_evolution, finds_rastrigin_minimum) {
    auto rastrigin = [](const Eigen::VectorXd &x) {
        double s = 10.0 * static_cast<double>(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            s += x(i) * x(i) - 10 * std::cos(2 * M_PI * x(i));
        }
        return s;
    };
    DifferentialEvolutionOptions opt;
    opt.seed = 4;
    opt.generations = 600;
    auto r = differential_evolution(rastrigin, Eigen::VectorXd::Constant(3, -5.12), Eigen::VectorXd::Constant(3, 5.12), opt);
    EXPECT_LT(r.value, 1e-6);
    EXPECT_LT(r.x.norm(), 1e-3);
}

TEST(differential_evolution, deterministic) {
    auto f = [](const Eigen::VectorXd &x) { return (x.array() - 0.3).square().sum(); };
    DifferentialEvolutionOptions opt;
    opt.seed = 9;
    opt.generations = 50;
    auto a = differential_evolution(f, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4), opt);
    auto b = differential_evolution(f, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4), opt);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.value, b.value);
}

TEST(levenberg_marquardt, rosenbrock) {
    auto r = [](const Eigen::VectorXd &x) {
        Eigen::VectorXd out(2);
        out << 10 * (x(1) - x(0) * x(0)), 1 - x(0);
        return out;
    };
    auto fit = levenberg_marquardt(r, Eigen::Vector2d(-1.2, 1.0));
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.x(0), 1.0, 1e-8);
    EXPECT_NEAR(fit.x(1), 1.0, 1e-8);
    EXPECT_LT(fit.value, 1e-20);
}

TEST(levenberg_marquardt, analytic_jacobian_agrees) {
    auto r = [](const Eigen::VectorXd &x) {
        Eigen::VectorXd out(3);
        out << std::sin(x(0)) - 0.5, x(0) * x(1) - 1, x(1) - 2;
        return out;
    };
    auto j = [](const Eigen::VectorXd &x) {
        Eigen::MatrixXd out(3, 2);
        out << std::cos(x(0)), 0, x(1), x(0), 0, 1;
        return out;
    };
    auto a = levenberg_marquardt(r, Eigen::Vector2d(0.1, 0.1));
    auto b = levenberg_marquardt(r, Eigen::Vector2d(0.1, 0.1), {}, j);
    EXPECT_NEAR(a.value, b.value, 1e-10);
    EXPECT_NEAR(a.x(0), b.x(0), 1e-6);
}
