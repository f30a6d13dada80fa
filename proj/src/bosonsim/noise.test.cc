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

#include "bosonsim/noise.h"

#include <gtest/gtest.h>

#include <cmath>

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

// |011010> from two sources: a pair into modes 1 and 2, and a heralded photon into mode 4.
std::vector<PdcSource> three_photon_sources(double l1, double l2) {
    return {PdcSource{l1, {1, 2}}, PdcSource{l2, {4}}};
}

DilationUnitary haar_circuit(uint64_t seed) {
    CounterRng rng(seed);
    return dilate(haar_unitary(6, rng));
}

}  // namespace

TEST(click_distribution, collision_free_is_identity) {
    CounterRng rng(1);
    auto u = haar_unitary(5, rng);
    auto occ = distribution(u, {1, 1, 1, 0, 0}, enumerate_outcomes(5, 3, true));
    auto clicks = click_distribution(occ, 3);
    ASSERT_EQ(clicks.outcomes(), occ.outcomes());
    for (size_t k = 0; k < occ.size(); ++k) {
        EXPECT_NEAR(clicks.probs()[k], occ.probs()[k], 1e-15);
    }
    EXPECT_EQ(clicks.metadata().kind, OutcomeKind::kClickPattern);
}

TEST(click_distribution, aggregates_bunched_outcomes) {
    OutcomeDistribution occ(
        {ModeOccupation({2, 1, 0}), ModeOccupation({1, 1, 1}), ModeOccupation({0, 3, 0})}, {0.5, 0.3, 0.2});
    auto all = aggregate_clicks(occ);
    EXPECT_NEAR(all.total(), occ.total(), 1e-15);
    EXPECT_NEAR(all.probability({1, 1, 0}), 0.5, 1e-15);
    EXPECT_NEAR(all.probability({0, 1, 0}), 0.2, 1e-15);
    auto two = click_distribution(occ, 2);
    EXPECT_EQ(two.size(), 3u);
    EXPECT_NEAR(two.probability({1, 1, 0}), 1.0, 1e-15);
    OutcomeDistribution none({ModeOccupation({3, 0, 0})}, {1.0});
    EXPECT_THROW(click_distribution(none, 2), NumericalError);
}

TEST(click_distribution, four_photons_at_three_clicks) {
    CounterRng rng(2);
    auto u = haar_unitary(6, rng);
    auto occ = distribution(u, {2, 0, 2, 0, 0, 0}, enumerate_outcomes(6, 4, false));
    auto clicks = click_distribution(occ, 3);
    EXPECT_EQ(clicks.size(), 20u);
    std::vector<double> brute(clicks.size(), 0.0);
    double kept = 0;
    for (size_t k = 0; k < occ.size(); ++k) {
        const auto &s = occ.outcomes()[k];
        if (s.num_occupied() != 3) {
            continue;
        }
        kept += occ.probs()[k];
        for (size_t p = 0; p < clicks.size(); ++p) {
            bool same = true;
            for (size_t j = 0; j < 6; ++j) {
                same = same && ((s[j] > 0) == (clicks.outcomes()[p][j] > 0));
            }
            if (same) {
                brute[p] += occ.probs()[k];
            }
        }
    }
    for (size_t p = 0; p < clicks.size(); ++p) {
        EXPECT_NEAR(clicks.probs()[p], brute[p] / kept, 1e-12);
    }
}

TEST(higher_order_terms, weights_and_inputs) {
    ModeOccupation base({0, 1, 1, 0, 1, 0});
    auto terms = higher_order_terms(base, three_photon_sources(0.011, 0.011), 3);
    ASSERT_EQ(terms.size(), 3u);
    EXPECT_EQ(terms[0].input, base);
    EXPECT_EQ(terms[0].weight, 1.0);
    EXPECT_EQ(terms[1].input, ModeOccupation({0, 2, 2, 0, 1, 0}));
    EXPECT_EQ(terms[1].weight, 0.011);
    EXPECT_EQ(terms[2].input, ModeOccupation({0, 1, 1, 0, 2, 0}));
    EXPECT_EQ(terms[2].weight, 0.011);

    auto four = higher_order_terms({2, 0, 2, 0, 0, 0}, {PdcSource{0.023, {0, 2}, 2}}, 4);
    ASSERT_EQ(four.size(), 2u);
    EXPECT_EQ(four[1].input, ModeOccupation({3, 0, 3, 0, 0, 0}));

    PdcSource deep{0.1, {1, 2}, 1, 3};
    auto deeper = higher_order_terms(base, {deep}, 3);
    ASSERT_EQ(deeper.size(), 3u);
    EXPECT_NEAR(deeper[2].weight, 0.01, 1e-15);
    EXPECT_EQ(deeper[2].input, ModeOccupation({0, 3, 3, 0, 1, 0}));
}

TEST(higher_order_terms, errors) {
    ModeOccupation base({0, 1, 1, 0, 1, 0});
    EXPECT_THROW(higher_order_terms(base, {PdcSource{0.1, {0, 1}}}, 3), std::invalid_argument);
    EXPECT_THROW(higher_order_terms(base, {PdcSource{0.1, {1, 2}, 1, 1}}, 4), std::invalid_argument);
    EXPECT_THROW(higher_order_terms(base, {PdcSource{0.1, {9}}}, 3), std::invalid_argument);
}

TEST(higher_order_mixture, zero_lambda_is_ideal) {
    auto circuit = haar_circuit(3);
    ModeOccupation base({0, 1, 1, 0, 1, 0});
    auto mix = higher_order_mixture(circuit, base, three_photon_sources(0, 0), 3);
    auto ideal = ideal_click_distribution(circuit, base);
    EXPECT_LE(l1_distance(mix, ideal), 1e-12);
}

TEST(higher_order_mixture, lossless_extra_pairs_only_through_collisions) {
    auto circuit = haar_circuit(4);
    ModeOccupation base({0, 1, 1, 0, 1, 0});
    // In a lossless circuit a 5-photon term can only give 3 clicks through bunching, so its raw
    // 3-click weight equals the bunched part of its occupation distribution.
    ModeOccupation extra({0, 2, 2, 0, 1, 0});
    auto raw = raw_click_distribution(circuit, extra, 3);
    auto occ = distribution(circuit.system_block(), extra, enumerate_outcomes(6, 5, false), false);
    auto agg = aggregate_clicks(occ);
    for (size_t k = 0; k < raw.size(); ++k) {
        EXPECT_NEAR(raw.probs()[k], agg.probability(raw.outcomes()[k]), 1e-12);
    }
    // Losing photons is impossible: no weight leaves the system modes.
    auto full = full_output_distribution(circuit, extra);
    double outside = 0;
    for (size_t k = 0; k < full.size(); ++k) {
        if (full.outcomes()[k].head(6).total() != 5) {
            outside += full.probs()[k];
        }
    }
    EXPECT_NEAR(outside, 0.0, 1e-12);
}

TEST(higher_order_mixture, weighted_sum_of_terms) {
    auto circuit = haar_circuit(5);
    ModeOccupation base({0, 1, 1, 0, 1, 0});
    auto sources = three_photon_sources(0.011, 0.011);
    auto mix = higher_order_mixture(circuit, base, sources, 3);
    std::vector<double> want(mix.size(), 0.0);
    for (const auto &term : higher_order_terms(base, sources, 3)) {
        auto raw = raw_click_distribution(circuit, term.input, 3);
        for (size_t k = 0; k < raw.size(); ++k) {
            want[k] += term.weight * raw.probs()[k];
        }
    }
    double z = 0;
    for (double w : want) {
        z += w;
    }
    for (size_t k = 0; k < mix.size(); ++k) {
        EXPECT_NEAR(mix.probs()[k], want[k] / z, 1e-14);
    }
    EXPECT_NEAR(mix.total(), 1.0, 1e-9);
}

TEST(distinguishable_distribution, hom_dip_vanishes) {
    auto d = distinguishable_distribution(hadamard_splitter(), {1, 1}, 0);
    EXPECT_NEAR(d.probability({1, 1}), 0.5, 1e-12);
    EXPECT_NEAR(d.probability({2, 0}), 0.25, 1e-12);
}

TEST(distinguishable_distribution, two_photons_match_incoherent_sum) {
    CounterRng rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        auto u = haar_unitary(4, rng);
        for (size_t i1 = 0; i1 < 4; ++i1) {
            for (size_t i2 = i1 + 1; i2 < 4; ++i2) {
                auto t = ModeOccupation::vacuum(4).with_added(i1).with_added(i2);
                for (size_t which = 0; which < 2; ++which) {
                    auto d = distinguishable_distribution(u, t, which, std::nullopt, false);
                    for (size_t j1 = 0; j1 < 4; ++j1) {
                        for (size_t j2 = j1 + 1; j2 < 4; ++j2) {
                            auto s = ModeOccupation::vacuum(4).with_added(j1).with_added(j2);
                            EXPECT_NEAR(d.probability(s), oracle::two_photon_distinguishable(u.entries(), i1, i2, j1, j2), 1e-12);
                        }
                    }
                }
            }
        }
    }
}

TEST(distinguishable_distribution, three_photon_term_by_term) {
    CounterRng rng(7);
    auto u = haar_unitary(5, rng);
    ModeOccupation t({1, 0, 1, 1, 0});
    auto outcomes = enumerate_outcomes(5, 3, true);
    for (size_t which = 0; which < 3; ++which) {
        auto d = distinguishable_distribution(u, t, which, outcomes, false);
        for (size_t k = 0; k < outcomes.size(); ++k) {
            auto modes = outcomes[k].photon_modes();
            EXPECT_NEAR(d.probs()[k], oracle::three_photon_one_distinguishable(u.entries(), {0, 2, 3}, modes, which), 1e-12);
        }
    }
}

TEST(distinguishable_distribution, errors) {
    EXPECT_THROW(distinguishable_distribution(hadamard_splitter(), {2, 0}, 0), std::invalid_argument);
    EXPECT_THROW(distinguishable_distribution(hadamard_splitter(), {1, 1}, 2), std::invalid_argument);
}

TEST(partial_distinguishability, weights) {
    auto w = distinguishability_weights(0.974, 3);
    const double a2 = 0.974 * 0.974;
    EXPECT_NEAR(w.per_photon, a2 * a2 * (1 - a2), 1e-15);
    EXPECT_NEAR(w.per_photon, 0.046191, 1e-6);
    EXPECT_NEAR(w.ideal, std::pow(a2, 3), 1e-15);
    auto w4 = distinguishability_weights(0.974, 4);
    EXPECT_NEAR(w4.per_photon, std::pow(a2, 3) * (1 - a2), 1e-15);
    EXPECT_THROW(distinguishability_weights(1.1, 3), std::invalid_argument);
}

TEST(partial_distinguishability, alpha_one_is_ideal) {
    CounterRng rng(8);
    auto u = haar_unitary(6, rng);
    ModeOccupation t({0, 1, 1, 0, 1, 0});
    auto outcomes = enumerate_outcomes(6, 3, true);
    auto mix = partial_distinguishability_mixture(u, t, 1.0, outcomes);
    auto ideal = distribution(u, t, outcomes);
    EXPECT_EQ(mix.probs(), ideal.probs());
}

TEST(partial_distinguishability, hom_visibility_reduced) {
    auto bs = hadamard_splitter();
    for (double alpha : {1.0, 0.974, 0.9, 0.5}) {
        auto mix = partial_distinguishability_mixture(bs, {1, 1}, alpha);
        auto w = distinguishability_weights(alpha, 2);
        // P(1,1) = (2 w1 * 1/2) / (w0 + 2 w1); visibility against the distinguishable 1/2.
        double expect = w.per_photon / (w.ideal + 2 * w.per_photon);
        EXPECT_NEAR(mix.probability({1, 1}), expect, 1e-12);
        double visibility = 1 - mix.probability({1, 1}) / 0.5;
        EXPECT_LE(visibility, 1.0 + 1e-15);
        if (alpha < 1) {
            EXPECT_LT(visibility, 1.0);
        }
    }
    // Around 90% of ideal visibility needs alpha near 0.974 in this model.
    double v = 1 - partial_distinguishability_mixture(bs, {1, 1}, 0.974).probability({1, 1}) / 0.5;
    EXPECT_GT(v, 0.85);
    EXPECT_LT(v, 0.95);
}

TEST(partial_distinguishability, handles_doubly_occupied_inputs) {
    CounterRng rng(9);
    auto u = haar_unitary(6, rng);
    ModeOccupation t({2, 0, 2, 0, 0, 0});
    auto mix = partial_distinguishability_mixture(u, t, 0.974);
    EXPECT_NEAR(mix.total(), 1.0, 1e-12);
    // Marking one photon of a two-photon mode: the rest stays one photon in that mode.
    auto outcomes = enumerate_outcomes(6, 4, false);
    auto half = partial_distinguishability_mixture(u, t, 0.5, outcomes);
    EXPECT_NEAR(half.total(), 1.0, 1e-12);
    auto ideal = distribution(u, t, outcomes);
    EXPECT_GT(l1_distance(half, ideal), 1e-3);
    // alpha = 0 leaves every first-order weight at zero.
    EXPECT_THROW(partial_distinguishability_mixture(u, t, 0.0, outcomes), NumericalError);
}

TEST(dark_counts, zero_rate_is_identity) {
    CounterRng rng(10);
    auto u = haar_unitary(6, rng);
    auto p = ideal_click_distribution(dilate(u), {0, 1, 1, 0, 1, 0});
    DarkCountModel model{{0.0}, ideal_click_distribution(dilate(u), {0, 1, 1, 0, 0, 0}), 1.0};
    auto out = dark_count_adjust(p, model, DarkCountMode::kAdd);
    for (size_t k = 0; k < p.size(); ++k) {
        EXPECT_NEAR(out.probs()[k], p.probs()[k], 1e-15);
    }
}

TEST(dark_counts, add_then_subtract_at_five_percent) {
    CounterRng rng(11);
    auto u = haar_unitary(6, rng);
    auto circuit = dilate(u);
    auto p = ideal_click_distribution(circuit, {0, 1, 1, 0, 1, 0});
    DarkCountModel model;
    model.dark_rate = {1e-3, 2e-3, 1e-3, 3e-3, 1e-3, 2e-3};
    model.lower = ideal_click_distribution(circuit, {0, 1, 1, 0, 0, 0});
    model.rate_ratio = rate_ratio_for_fraction(model, p.outcomes(), 0.05);
    auto b = background_contribution(model, p.outcomes());
    EXPECT_NEAR(b.total(), 0.05, 1e-12);
    auto noisy = dark_count_adjust(p, model, DarkCountMode::kAdd);
    EXPECT_NEAR(noisy.total(), 1.0, 1e-12);
    double before_renorm = 0;
    for (size_t k = 0; k < noisy.size(); ++k) {
        before_renorm += noisy.probs()[k] - b.probs()[k];
    }
    EXPECT_NEAR(before_renorm, 0.95, 1e-12);
    auto back = dark_count_adjust(noisy, model, DarkCountMode::kSubtract);
    for (size_t k = 0; k < p.size(); ++k) {
        EXPECT_NEAR(back.probs()[k], p.probs()[k], 1e-9);
    }
}

TEST(dark_counts, inconsistent_subtraction) {
    OutcomeDistribution p({ModeOccupation({1, 1, 0}), ModeOccupation({1, 0, 1}), ModeOccupation({0, 1, 1})}, {0.98, 0.01, 0.01});
    OutcomeDistribution lower({ModeOccupation({1, 0, 0}), ModeOccupation({0, 1, 0}), ModeOccupation({0, 0, 1})}, {0.0, 0.0, 1.0});
    DarkCountModel model{{0.1}, lower, 1.0};
    EXPECT_THROW(dark_count_adjust(p, model, DarkCountMode::kSubtract), NumericalError);
}

TEST(NoiseModel, noise_off_matches_ideal) {
    auto circuit = haar_circuit(12);
    ModeOccupation t({0, 1, 1, 0, 1, 0});
    NoiseParams params{three_photon_sources(0, 0), 1.0, {}, 3};
    auto p_mod = build_p_mod(params, circuit, t);
    auto p_th = ideal_click_distribution(circuit, t);
    EXPECT_LE(l1_distance(p_mod, p_th), 1e-12);
}

TEST(NoiseModel, operating_point_and_sweep) {
    auto circuit = haar_circuit(13);
    ModeOccupation t({0, 1, 1, 0, 1, 0});
    NoiseModel model(circuit, t, three_photon_sources(0, 0), 3);
    double previous = -1;
    for (double l2 : {0.0, 0.005, 0.011, 0.023, 0.05}) {
        NoiseParams params{three_photon_sources(l2, l2), 0.974, {}, 3};
        auto p_mod = model.evaluate(params);
        EXPECT_NEAR(p_mod.total(), 1.0, 1e-9);
        double d = l1_distance(p_mod, model.ideal());
        EXPECT_GT(d, 0.0);
        EXPECT_GE(d, previous - 1e-15);
        previous = d;
    }
}

TEST(NoiseModel, continuity_in_parameters) {
    auto circuit = haar_circuit(14);
    ModeOccupation t({0, 1, 1, 0, 1, 0});
    NoiseModel model(circuit, t, three_photon_sources(0, 0), 3);
    auto d_at = [&](double l2, double alpha) {
        return l1_distance(model.evaluate(NoiseParams{three_photon_sources(l2, l2), alpha, {}, 3}), model.ideal());
    };
    for (double l2 : {0.005, 0.011, 0.023}) {
        double full = d_at(l2, 1.0);
        double half = d_at(l2 / 2, 1.0);
        EXPECT_LE(half, full * 0.5 * 1.2);
        EXPECT_GE(half, full * 0.5 * 0.8);
    }
    // d is linear in the weight carried by the distinguishable terms; halving (1 - alpha)
    // should scale d like that weight, up to the post-selection nonlinearity.
    auto fraction = [](double a) {
        auto w = distinguishability_weights(a, 3);
        return 3 * w.per_photon / (w.ideal + 3 * w.per_photon);
    };
    for (double a : {0.9, 0.95, 0.974}) {
        double full = d_at(0, a);
        double a_half = 1 - (1 - a) / 2;
        double half = d_at(0, a_half);
        double expected = fraction(a_half) / fraction(a);
        EXPECT_LE(half, full * expected * 1.2);
        EXPECT_GE(half, full * expected * 0.8);
    }
}


TEST(NoiseModel, four_photon_input_and_dark_counts) {
    auto circuit = haar_circuit(15);
    ModeOccupation t({2, 0, 2, 0, 0, 0});
    NoiseParams params{{PdcSource{0.023, {0, 2}, 2}}, 0.974, {1e-3}, 4};
    auto p_mod = build_p_mod(params, circuit, t);
    EXPECT_EQ(p_mod.size(), 15u);
    EXPECT_NEAR(p_mod.total(), 1.0, 1e-9);
    EXPECT_GT(l1_distance(p_mod, ideal_click_distribution(circuit, t)), 0.0);
}

TEST(NoiseModel, lossy_network) {
    CounterRng rng(16);
    auto l = random_subunitary(6, rng, 0.5);
    auto circuit = dilate(l);
    ModeOccupation t({0, 1, 1, 0, 1, 0});
    NoiseModel model(circuit, t, three_photon_sources(0, 0), 3);
    // With loss, an extra pair can reach three clicks by losing photons, not only by bunching.
    double lossy_gap = l1_distance(model.evaluate({three_photon_sources(0.011, 0.011), 1.0, {}, 3}), model.ideal());
    EXPECT_GT(lossy_gap, 0.0);
    EXPECT_THROW(model.evaluate({{PdcSource{0.011, {1, 2}}}, 1.0, {}, 3}), std::invalid_argument);
}
