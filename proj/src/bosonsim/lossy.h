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

#ifndef BOSONSIM_LOSSY_H
#define BOSONSIM_LOSSY_H

#include <cstdint>
#include <vector>

#include "bosonsim/fock.h"
#include "bosonsim/sampling.h"

namespace bosonsim {

/// Two-mode coupler. `reflectivity` is the power fraction that stays in its own mode;
/// `phase` is applied to mode `a` ahead of the coupler. With c = sqrt(r), s = sqrt(1 - r),
/// the element maps (rows = inputs a, b; columns = outputs a, b)
///     [[e^{i phase} c, e^{i phase} i s],
///      [i s,           c              ]].
/// A 50:50 element with zero phase is (1/sqrt 2) [[1, i], [i, 1]].
struct BeamSplitter {
    size_t a = 0;
    size_t b = 0;
    double reflectivity = 0.5;
    double phase = 0;
};

/// Beam-splitter network on `modes` modes, of which `accessible` are reachable by sources
/// and detectors. Elements act in listed order.
struct CircuitTopology {
    size_t modes = 0;
    std::vector<size_t> accessible;
    std::vector<BeamSplitter> elements;

    /// Throws std::invalid_argument on out-of-range or repeated indices or bad parameters.
    void validate() const;
};

ComplexMatrix beam_splitter_matrix(const BeamSplitter &element);

/// Product of all element embeddings over every mode (unitary, modes x modes).
ComplexMatrix full_unitary(const CircuitTopology &topo);

/// full_unitary restricted to the accessible rows and columns, in `accessible` order.
TransferMatrix topology_to_matrix(const CircuitTopology &topo);

/// Unitary on system plus environment modes; the first `accessible` modes are the system.
struct DilationUnitary {
    TransferMatrix unitary;
    size_t accessible = 0;

    size_t total_modes() const {
        return unitary.size();
    }
    TransferMatrix system_block() const;
};

/// 2M x 2M unitary with Lambda as its upper-left block. From Lambda = W S V^dagger and
/// C = sqrt(1 - S^2):
///     U = [[Lambda, -W C], [C V^dagger, S]]
/// so a unitary Lambda dilates to Lambda (+) identity.
DilationUnitary dilate(const TransferMatrix &lambda);

/// The topology's full unitary with accessible modes moved to the front (in `accessible`
/// order) and the remaining modes after them in index order.
DilationUnitary topology_dilation(const CircuitTopology &topo);

/// Raw output distribution over every mode of `circuit` for photons injected into the
/// system modes only. `input` may list just the system modes.
OutcomeDistribution full_output_distribution(const DilationUnitary &circuit, const ModeOccupation &input);

/// Evolves under the full unitary, keeps outcomes with all `photons` photons in system modes,
/// and renormalizes. Outcomes are the system-mode occupations in enumerate_outcomes order.
OutcomeDistribution postselected_distribution(
    const DilationUnitary &circuit, const ModeOccupation &input, size_t photons);

/// Probability that no photon is lost: the summed raw weights of all system outcomes.
double survival_probability(const TransferMatrix &lambda, const ModeOccupation &input);

/// Loss fractions in [0, 1], one per accessible mode (in `accessible` order) for each group.
/// Source losses act before the first element, circuit losses after element
/// elements.size() / 2, detector losses after the last element.
struct LossBudget {
    std::vector<double> source;
    std::vector<double> circuit;
    std::vector<double> detector;

    static LossBudget zero(size_t accessible);
    std::vector<double> flatten() const;
    static LossBudget unflatten(const std::vector<double> &values, size_t accessible);
};

/// Adds one environment mode per loss channel and a coupler of reflectivity 1 - loss.
CircuitTopology with_losses(const CircuitTopology &lossless, const LossBudget &losses);

/// Same matrix as topology_to_matrix(with_losses(...)), built from diagonal attenuations.
TransferMatrix lossy_matrix(const CircuitTopology &lossless, const LossBudget &losses);

struct LossFitOptions {
    uint64_t seed = 0;
    size_t population = 0;
    size_t generations = 400;
    size_t polish_iterations = 500;
    /// Largest accepted || |Lambda_fit| - |Lambda_target| ||_F.
    double max_residual = 1e-6;
};

struct LossFit {
    LossBudget losses;
    /// Each group's losses divided by its largest entry (all zero when the group is lossless).
    LossBudget relative;
    double source_scale = 0;
    double circuit_scale = 0;
    double detector_scale = 0;
    /// Frobenius distance between fitted and target magnitudes.
    double residual = 0;
};

/// Finds per-channel losses on a known lossless network whose magnitudes best reproduce
/// |target|: a seeded differential-evolution search followed by Levenberg-Marquardt polish.
/// Throws ConvergenceError when the final residual exceeds options.max_residual.
LossFit fit_loss_budget(const CircuitTopology &lossless, const TransferMatrix &target, const LossFitOptions &options = {});

}  // namespace bosonsim

#endif
