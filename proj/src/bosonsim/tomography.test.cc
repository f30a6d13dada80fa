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

#include "bosonsim/tomography.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bosonsim/errors.h"
#include "bosonsim/random_matrix.h"
#include "oracles.h"

using namespace bosonsim;

namespace {

TransferMatrix hadamard_splitter() {
    ComplexMatrix m(2, 2);
    m << 1, 1, 1, -1;
    return TransferMatrix(m / std::sqrt(2.0));
}

double max_distribution_gap(const TransferMatrix &a, const TransferMatrix &b, size_t n) {
    const size_t m = a.size();
    double worst = 0;
    auto outcomes = enumerate_outcomes(m, n, false);
    for (const auto &t : enumerate_outcomes(m, n, true)) {
        auto pa = distribution(a, t, outcomes);
        auto pb = distribution(b, t, outcomes);
        for (size_t k = 0; k < outcomes.size(); ++k) {
            worst = std::max(worst, std::abs(pa.probs()[k] - pb.probs()[k]));
        }
    }
    return worst;
}

}  // namespace

TEST(simulate_one_photon, exact_tables) {
    auto id = simulate_one_photon(TransferMatrix::identity(3));
    EXPECT_TRUE(id.frequency.isApprox(Eigen::MatrixXd::Identity(3, 3)));
    auto bs = simulate_one_photon(hadamard_splitter());
    EXPECT_LE((bs.frequency.array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(simulate_one_photon, shot_noise_within_five_sigma) {
    CounterRng rng(10);
    auto u = haar_unitary(6, rng);
    const uint64_t shots = 1000000;
    auto noisy = simulate_one_photon(u, shots, 3);
    Eigen::MatrixXd exact = u.entries().cwiseAbs2();
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            double p = exact(i, j);
            double sigma = std::sqrt(p * (1 - p) / static_cast<double>(shots));
            EXPECT_LE(std::abs(noisy.frequency(i, j) - p), 5 * sigma + 1e-12);
            EXPECT_GE(noisy.variance(i, j), 0.0);
        }
    }
}

TEST(simulate_two_photon, hong_ou_mandel) {
    auto p = simulate_two_photon(hadamard_splitter(), 0, 1, 0, 1);
    EXPECT_NEAR(p.indistinguishable, 0.0, 1e-15);
    EXPECT_NEAR(p.distinguishable, 0.5, 1e-15);
    EXPECT_NEAR(p.visibility, 1.0, 1e-15);
}

TEST(simulate_two_photon, real_matrix_formula) {
    Eigen::MatrixXd tau(3, 3);
    tau << 0.3, 0.5, 0.8, 0.6, 0.2, 0.4, 0.7, 0.9, 0.1;
    auto l = TransferMatrix(tau.cast<Complex>());
    auto p = simulate_two_photon(l, 0, 2, 1, 2);
    double a = tau(0, 1) * tau(2, 2), b = tau(0, 2) * tau(2, 1);
    // In-phase amplitudes add, so the coincidence rate rises above P_dist.
    EXPECT_NEAR(p.visibility, -2 * a * b / (a * a + b * b), 1e-14);
}

TEST(simulate_two_photon, matches_distribution_engine) {
    CounterRng rng(13);
    auto u = haar_unitary(6, rng);
    auto p = simulate_two_photon(u, 1, 4, 0, 3);
    ModeOccupation t({0, 1, 0, 0, 1, 0}), s({1, 0, 0, 1, 0, 0});
    auto d = distribution(u, t, {s}, false);
    EXPECT_NEAR(p.indistinguishable, d.probs()[0], 1e-12);
    EXPECT_NEAR(p.distinguishable, oracle::two_photon_distinguishable(u.entries(), 1, 4, 0, 3), 1e-14);
    EXPECT_NEAR(p.visibility, (p.distinguishable - p.indistinguishable) / p.distinguishable, 1e-14);
    EXPECT_GE(p.visibility, -1.0);
    EXPECT_LE(p.visibility, 1.0);
}

TEST(simulate_two_photon, undefined_visibility) {
    EXPECT_THROW(simulate_two_photon(TransferMatrix::identity(3), 0, 1, 0, 2), NumericalError);
}

TEST(recover_magnitudes, arithmetic_and_row_max) {
    OnePhotonData d;
    d.frequency = Eigen::MatrixXd(3, 3);
    d.frequency << 0.25, 0.25, 0.5, 0.1, 0.6, 0.3, 1, 0, 0;
    d.variance = Eigen::MatrixXd::Zero(3, 3);
    auto mag = recover_magnitudes(d);
    EXPECT_NEAR(mag.tau(0, 0), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(mag.tau(0, 1), std::sqrt(0.5), 1e-15);
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_EQ(mag.tau.row(i).maxCoeff(), 1.0);
    }
    d.frequency.row(1).setZero();
    EXPECT_THROW(recover_magnitudes(d), std::invalid_argument);
}

TEST(recover_magnitudes, proportional_to_unitary) {
    CounterRng rng(14);
    auto u = haar_unitary(5, rng);
    auto mag = recover_magnitudes(simulate_one_photon(u));
    Eigen::MatrixXd abs = u.entries().cwiseAbs();
    for (Eigen::Index i = 0; i < 5; ++i) {
        Eigen::VectorXd ratio = mag.tau.row(i).array() / abs.row(i).array();
        EXPECT_LE(ratio.maxCoeff() - ratio.minCoeff(), 1e-12);
    }
}

TEST(recover_magnitudes, noisy_within_error_bars) {
    CounterRng rng(15);
    auto u = haar_unitary(6, rng);
    auto mag = recover_magnitudes(simulate_one_photon(u, 200000, 8));
    auto exact = recover_magnitudes(simulate_one_photon(u));
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            EXPECT_LE(std::abs(mag.tau(i, j) - exact.tau(i, j)), 6 * std::sqrt(mag.variance(i, j)) + 1e-12);
        }
    }
}

TEST(PhaseModel, full_mask_gauge) {
    auto model = PhaseModel::full(4);
    EXPECT_EQ(model.fixed().size(), 7u);
    EXPECT_EQ(model.free().size(), 9u);
    for (const auto &[i, j] : model.fixed()) {
        EXPECT_TRUE(i == 0 || j == 0);
    }
}

TEST(recover_phases, noiseless_round_trip) {
    CounterRng rng(16);
    auto u = haar_unitary(6, rng);
    auto mag = recover_magnitudes(simulate_one_photon(u));
    auto data = simulate_visibilities(u);
    auto model = PhaseModel::full(6);
    auto fit = recover_phases(mag.tau, data, model);
    EXPECT_LE(fit.residual, 1e-10);
    EXPECT_EQ(fit.free_phases, 25u);
    EXPECT_EQ(fit.rank, 25u);
    auto rec = assemble_matrix(mag.tau, fit.phases);
    EXPECT_LE(max_distribution_gap(u, rec, 3), 1e-6);
    EXPECT_LE(max_distribution_gap(u, rec, 2), 1e-6);
    for (const auto &[i, j] : model.fixed()) {
        EXPECT_EQ(fit.phases(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 0.0);
    }
}

TEST(recover_phases, gauge_fixed_phases_match_truth_up_to_conjugation) {
    CounterRng rng(17);
    auto u = haar_unitary(4, rng);
    auto mag = recover_magnitudes(simulate_one_photon(u));
    auto fit = recover_phases(mag.tau, simulate_visibilities(u), PhaseModel::full(4));
    Eigen::MatrixXd truth(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            double g = std::arg(u.entries()(i, j)) - std::arg(u.entries()(i, 0)) - std::arg(u.entries()(0, j)) +
                       std::arg(u.entries()(0, 0));
            truth(i, j) = std::remainder(g, 2 * std::numbers::pi);
        }
    }
    auto wrapped_gap = [](double a, double b) { return std::abs(std::remainder(a - b, 2 * std::numbers::pi)); };
    double direct = 0, conj = 0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            direct = std::max(direct, wrapped_gap(fit.phases(i, j), truth(i, j)));
            conj = std::max(conj, wrapped_gap(fit.phases(i, j), -truth(i, j)));
        }
    }
    EXPECT_LE(std::min(direct, conj), 1e-6);
}

TEST(recover_phases, real_matrix_gives_zero_or_pi) {
    CounterRng rng(18);
    Eigen::MatrixXd signs(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            signs(i, j) = (0.2 + rng.uniform()) * (rng.uniform() < 0.5 ? -1 : 1);
        }
    }
    auto l = TransferMatrix(signs.cast<Complex>());
    auto mag = recover_magnitudes(simulate_one_photon(l));
    auto fit = recover_phases(mag.tau, simulate_visibilities(l), PhaseModel::full(4));
    EXPECT_LE(fit.residual, 1e-10);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            double p = std::abs(fit.phases(i, j));
            EXPECT_TRUE(p < 1e-6 || std::abs(p - std::numbers::pi) < 1e-6) << p;
        }
    }
}

TEST(recover_phases, single_record_is_underdetermined) {
    CounterRng rng(19);
    auto u = haar_unitary(3, rng);
    auto mag = recover_magnitudes(simulate_one_photon(u));
    auto data = simulate_visibilities(u);
    data.resize(1);
    try {
        recover_phases(mag.tau, data, PhaseModel::full(3));
        FAIL() << "expected UnderdeterminedError";
    } catch (const UnderdeterminedError &e) {
        EXPECT_EQ(e.unknowns, 4u);
        EXPECT_EQ(e.rank, 1u);
        EXPECT_EQ(e.missing(), 3u);
    }
}

TEST(recover_phases, sparse_mask) {
    // Network-like zero pattern: a banded matrix built from couplers keeps few free phases.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(4, 4);
    mask << 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1;
    PhaseModel model(mask);
    EXPECT_EQ(model.fixed().size(), 7u);
    EXPECT_EQ(model.free().size(), 7u);
    CounterRng rng(20);
    Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(4, 4);
    Eigen::MatrixXd phases = Eigen::MatrixXd::Zero(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            if (mask(i, j)) {
                tau(i, j) = 0.3 + 0.7 * rng.uniform();
                phases(i, j) = std::numbers::pi * (2 * rng.uniform() - 1);
            }
        }
    }
    auto l = assemble_matrix(tau, phases);
    auto mag = recover_magnitudes(simulate_one_photon(l));
    auto fit = recover_phases(mag.tau, simulate_visibilities(l), PhaseModel::from_magnitudes(mag.tau));
    EXPECT_LE(fit.residual, 1e-10);
    EXPECT_LE(max_distribution_gap(l, assemble_matrix(mag.tau, fit.phases), 2), 1e-6);
}

TEST(resample_lambda, zero_variance_and_single_draw) {
    CounterRng rng(21);
    auto u = haar_unitary(3, rng);
    Eigen::MatrixXd tau = u.entries().cwiseAbs();
    Eigen::MatrixXd ph = u.entries().unaryExpr([](Complex z) { return std::arg(z); }).real();
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
    auto same = resample_lambda(tau, ph, zero, zero, 4, 1);
    ASSERT_EQ(same.size(), 4u);
    for (const auto &d : same) {
        EXPECT_EQ(d.entries(), same[0].entries());
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Constant(3, 3, 1e-4);
    auto one = resample_lambda(tau, ph, v, v, 1, 2);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_GT((one[0].entries() - same[0].entries()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::MatrixXd neg = zero;
    neg(1, 1) = -1;
    EXPECT_THROW(resample_lambda(tau, ph, neg, zero, 1, 1), std::invalid_argument);
}

TEST(resample_lambda, error_bars_shrink_with_shots) {
    CounterRng rng(22);
    auto u = haar_unitary(4, rng);
    ModeOccupation t({1, 1, 0, 0});
    auto outcomes = enumerate_outcomes(4, 2, true);
    Eigen::MatrixXd ph = u.entries().unaryExpr([](Complex z) { return std::arg(z); }).real();
    auto spread_at = [&](uint64_t shots) {
        auto mag = recover_magnitudes(simulate_one_photon(u, shots, 5));
        Eigen::MatrixXd phase_var = Eigen::MatrixXd::Constant(4, 4, 1.0 / static_cast<double>(shots));
        auto ens = resample_lambda(mag.tau, ph, mag.variance, phase_var, 400, 9);
        auto s = distribution_spread(ens, t, outcomes);
        double mean = 0;
        for (double x : s) {
            mean += x / static_cast<double>(s.size());
        }
        return mean;
    };
    double lo = spread_at(10000);
    double hi = spread_at(1000000);
    // 100x the shots should shrink the error bars by about 10x.
    EXPECT_GT(lo / hi, 6.0);
    EXPECT_LT(lo / hi, 16.0);
}
