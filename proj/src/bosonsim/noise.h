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

#ifndef BOSONSIM_NOISE_H
#define BOSONSIM_NOISE_H

#include <optional>
#include <string>
#include <vector>

#include "bosonsim/fock.h"
#include "bosonsim/lossy.h"
#include "bosonsim/sampling.h"

namespace bosonsim {

/// Parametric down-conversion pair source. `modes` are the accessible inputs its arms feed
/// (an arm sent to a herald detector is simply not listed). The base input holds `pairs`
/// pairs from this source; terms up to `max_pairs()` pairs are modeled, each extra pair
/// weighted by another factor of lambda^2.
struct PdcSource {
    double lambda2 = 0;
    std::vector<size_t> modes;
    uint32_t pairs = 1;
    /// Largest pair number kept; 0 means pairs + 1.
    uint32_t truncation = 0;

    uint32_t max_pairs() const {
        return truncation ? truncation : pairs + 1;
    }
};

struct NoiseParams {
    std::vector<PdcSource> sources;
    /// Amplitude overlap of every photon with the common mode.
    double alpha = 1;
    /// Accidental click probability per trial, one entry per accessible mode, or a single
    /// entry applied to every mode. Empty means no dark counts.
    std::vector<double> dark_rate;
    size_t postselect_n = 0;

    void validate(size_t modes) const;
    bool has_dark_counts() const;
};

/// Sums occupation probabilities per threshold-detector pattern over the first
/// `system_modes` modes (all modes when 0). Every pattern that occurs is kept, whatever its
/// click count; the total is unchanged.
OutcomeDistribution aggregate_clicks(const OutcomeDistribution &occupations, size_t system_modes = 0);

/// Patterns with exactly `clicks` clicks, in enumerate_outcomes(M, clicks, true) order,
/// renormalized. Throws NumericalError when no weight survives.
OutcomeDistribution click_distribution(const OutcomeDistribution &occupations, size_t clicks);

/// Unnormalized probabilities of each `clicks`-click pattern on the system modes when
/// `input` is sent through the circuit and environment modes are traced out.
OutcomeDistribution raw_click_distribution(const DilationUnitary &circuit, const ModeOccupation &input, size_t clicks);

struct MixtureTerm {
    ModeOccupation input;
    double weight = 1;
};

/// The base input (weight 1) followed, for each source in turn, by its extra-pair inputs
/// with weight (lambda^2)^k. Cross terms between sources are dropped.
std::vector<MixtureTerm> higher_order_terms(
    const ModeOccupation &base, const std::vector<PdcSource> &sources, size_t postselect_n);

/// Normalized sum over higher_order_terms of weight * raw_click_distribution.
OutcomeDistribution higher_order_mixture(
    const DilationUnitary &circuit, const ModeOccupation &base, const std::vector<PdcSource> &sources,
    size_t postselect_n);

/// Outcome probabilities when photon `which` (counting photons in mode order) is
/// distinguishable from the rest:
///     P(S) = sum_{j : S_j > 0} |Lambda_{d j}|^2 P_rest(S - e_j),
/// with d that photon's input mode and P_rest the indistinguishable distribution of the
/// remaining photons. `outcomes` defaults to every occupation with N photons. Throws when
/// that photon shares its input mode with others.
OutcomeDistribution distinguishable_distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, size_t which,
    const std::optional<std::vector<ModeOccupation>> &outcomes = std::nullopt, bool renormalize = true);

struct DistinguishabilityWeights {
    /// alpha^(2N)
    double ideal = 1;
    /// alpha^(2(N-1)) (1 - alpha^2), for each of the N photons
    double per_photon = 0;
};

DistinguishabilityWeights distinguishability_weights(double alpha, size_t photons);

/// Ideal distribution mixed with the N one-distinguishable-photon distributions using
/// distinguishability_weights, then renormalized. Terms with two or more distinguishable
/// photons are dropped. A photon in a multiply occupied input mode is handled exactly:
/// one photon of that mode is marked and the others stay identical.
OutcomeDistribution partial_distinguishability_mixture(
    const TransferMatrix &lambda, const ModeOccupation &input, double alpha,
    const std::optional<std::vector<ModeOccupation>> &outcomes = std::nullopt);

/// First-order accidental-click model. `lower` is the (N-1)-click pattern distribution,
/// `rate_ratio` the (N-1)-fold to N-fold coincidence rate ratio, and `dark_rate` the
/// per-mode accidental click probability (one entry, or one per mode).
struct DarkCountModel {
    std::vector<double> dark_rate;
    OutcomeDistribution lower;
    double rate_ratio = 1;
};

enum class DarkCountMode { kAdd, kSubtract };

/// b(S) = rate_ratio * sum_{j in S} lower(S - e_j) * dark_rate_j on the given N-click patterns.
OutcomeDistribution background_contribution(const DarkCountModel &model, const std::vector<ModeOccupation> &patterns);

/// rate_ratio that makes the background a fraction `fraction` of all N-fold counts.
double rate_ratio_for_fraction(const DarkCountModel &model, const std::vector<ModeOccupation> &patterns, double fraction);

/// kAdd: P' = (1 - B) P + b, with B = sum b. kSubtract: P = (P' - b) / (1 - B), the inverse.
/// Subtraction that drives a probability below -1e-9 throws NumericalError.
OutcomeDistribution dark_count_adjust(
    const OutcomeDistribution &clicks, const DarkCountModel &model, DarkCountMode mode);

/// Ideal post-selected distribution over collision-free N-click patterns of the circuit's
/// system block.
OutcomeDistribution ideal_click_distribution(const DilationUnitary &circuit, const ModeOccupation &input);

/// Precomputes every component of the full noise model for one circuit, input and set of
/// source arrangements, so the noise parameters can be swept cheaply.
class NoiseModel {
   public:
    NoiseModel(DilationUnitary circuit, ModeOccupation input, std::vector<PdcSource> sources, size_t postselect_n);

    const OutcomeDistribution &ideal() const {
        return ideal_;
    }

    /// P^mod. `params.sources` must list the same sources in the same order; only their
    /// lambda2 values are read.
    OutcomeDistribution evaluate(const NoiseParams &params) const;

   private:
    struct Component {
        double lambda_power = 0;
        size_t source = 0;
        std::vector<double> raw;
        std::vector<double> raw_lower;
    };

    DilationUnitary circuit_;
    ModeOccupation input_;
    std::vector<PdcSource> sources_;
    size_t postselect_n_;
    std::vector<ModeOccupation> patterns_;
    std::vector<ModeOccupation> lower_patterns_;
    OutcomeDistribution ideal_;
    std::vector<double> ideal_raw_;
    std::vector<std::vector<double>> distinguishable_raw_;
    std::vector<double> base_lower_raw_;
    std::vector<Component> components_;
};

/// Composes the higher-order mixture, partial distinguishability of the base term and
/// (when configured) dark counts into P^mod.
OutcomeDistribution build_p_mod(const NoiseParams &params, const DilationUnitary &circuit, const ModeOccupation &input);

}  // namespace bosonsim

#endif
