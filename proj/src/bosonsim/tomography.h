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

#ifndef BOSONSIM_TOMOGRAPHY_H
#define BOSONSIM_TOMOGRAPHY_H

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bosonsim/fock.h"
#include "bosonsim/optimize.h"
#include "bosonsim/sampling.h"

namespace bosonsim {

/// Single-photon transmission table: frequency(i, j) is the detection frequency at output j
/// for a photon injected at input i.
struct OnePhotonData {
    Eigen::MatrixXd frequency;
    Eigen::MatrixXd variance;

    void validate() const;
};

/// One two-photon interference measurement: inputs (i1, i2), outputs (j1, j2).
struct VisibilityRecord {
    size_t i1 = 0;
    size_t i2 = 0;
    size_t j1 = 0;
    size_t j2 = 0;
    double visibility = 0;
    double variance = 0;
};

using TwoPhotonData = std::vector<VisibilityRecord>;

struct TwoPhotonProbabilities {
    double indistinguishable = 0;
    double distinguishable = 0;
    /// (P_dist - P_indist) / P_dist; positive for a dip.
    double visibility = 0;
};

/// frequency = |Lambda|^2 exactly, zero variance.
OnePhotonData simulate_one_photon(const TransferMatrix &lambda);

/// `shots` photons per input, each detected at output j with probability |Lambda_ij|^2 or
/// lost with the remaining probability. Variance estimates are p(1 - p) / shots.
OnePhotonData simulate_one_photon(const TransferMatrix &lambda, uint64_t shots, uint64_t seed);

/// Coincidence probabilities for photons in inputs (i1, i2) detected at (j1, j2).
/// Throws NumericalError when P_dist is zero (visibility undefined).
TwoPhotonProbabilities simulate_two_photon(const TransferMatrix &lambda, size_t i1, size_t i2, size_t j1, size_t j2);

/// Noiseless visibility records for every i1 < i2, j1 < j2 with P_dist above `min_distinguishable`.
TwoPhotonData simulate_visibilities(const TransferMatrix &lambda, double min_distinguishable = 1e-12);

struct Magnitudes {
    Eigen::MatrixXd tau;
    Eigen::MatrixXd variance;
};

/// tau_ij = sqrt(P1_ij / max_j P1_ij), so each row peaks at exactly 1. Variances follow by
/// first-order propagation of the frequency variances.
Magnitudes recover_magnitudes(const OnePhotonData &data);

/// Which phases are unknown. Entries outside the mask have zero magnitude and no phase.
/// The gauge fixes to zero the phases along a spanning forest of the bipartite
/// (input, output) graph of masked entries, grown breadth-first from input 0; for a full
/// mask this is the first row and first column.
class PhaseModel {
   public:
    explicit PhaseModel(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask);
    static PhaseModel full(size_t m);
    static PhaseModel from_magnitudes(const Eigen::MatrixXd &tau, double threshold = 0);

    size_t size() const {
        return static_cast<size_t>(mask_.rows());
    }
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> &mask() const {
        return mask_;
    }
    const std::vector<std::pair<size_t, size_t>> &fixed() const {
        return fixed_;
    }
    const std::vector<std::pair<size_t, size_t>> &free() const {
        return free_;
    }

   private:
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
    std::vector<std::pair<size_t, size_t>> fixed_;
    std::vector<std::pair<size_t, size_t>> free_;
};

struct PhaseFitOptions {
    size_t starts = 32;
    uint64_t seed = 0;
    /// A start whose weighted squared error falls to this ends the search early.
    double early_exit = 1e-30;
    LevenbergMarquardtOptions solver{.max_iterations = 400, .gradient_tolerance = 0};
};

struct PhaseFit {
    /// Gauge-fixed phases in (-pi, pi]; zero outside the mask and on fixed entries.
    Eigen::MatrixXd phases;
    /// sum_k w_k (V_k - V_model_k)^2 with w_k = 1 / variance_k (1 when variance_k <= 0).
    double residual = 0;
    size_t rank = 0;
    size_t free_phases = 0;
    size_t starts_used = 0;
};

/// Weighted least-squares fit of the free phases to the visibility records, from
/// `options.starts` seeded random starting points. Throws UnderdeterminedError when the
/// records constrain fewer independent phase combinations than there are free phases, and
/// ConvergenceError when no start converges.
PhaseFit recover_phases(
    const Eigen::MatrixXd &tau, const TwoPhotonData &data, const PhaseModel &model, const PhaseFitOptions &options = {});

/// Predicted visibility for a record under magnitudes `tau` and `phases`.
double model_visibility(const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases, const VisibilityRecord &record);

/// tau_ij e^{i phi_ij}
TransferMatrix assemble_matrix(const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases);

/// Draws n_draws matrices with tau and phi perturbed by independent normal noise of the
/// given variances. Draw k uses stream k of `seed`. Perturbed magnitudes are clipped at 0.
std::vector<TransferMatrix> resample_lambda(
    const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases, const Eigen::MatrixXd &tau_variance,
    const Eigen::MatrixXd &phase_variance, size_t n_draws, uint64_t seed);

/// Per-outcome standard deviation of the renormalized distribution across an ensemble.
std::vector<double> distribution_spread(
    const std::vector<TransferMatrix> &ensemble, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes);

}  // namespace bosonsim

#endif
