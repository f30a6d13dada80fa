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

#ifndef BOSONSIM_SAMPLING_H
#define BOSONSIM_SAMPLING_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bosonsim/fock.h"

namespace bosonsim {

enum class OutcomeKind { kOccupation, kClickPattern };

struct DistributionMetadata {
    ModeOccupation input;
    std::string matrix_id;
    std::string postselection;
    OutcomeKind kind = OutcomeKind::kOccupation;
};

/// Probabilities over an ordered list of distinct outcomes. Click patterns are stored as
/// 0/1 occupations. Probabilities are non-negative; whether they sum to one depends on
/// how the table was built (raw lossy weights do not).
class OutcomeDistribution {
   public:
    OutcomeDistribution() = default;
    OutcomeDistribution(
        std::vector<ModeOccupation> outcomes, std::vector<double> probs, DistributionMetadata metadata = {});

    size_t size() const {
        return outcomes_.size();
    }
    const std::vector<ModeOccupation> &outcomes() const {
        return outcomes_;
    }
    const std::vector<double> &probs() const {
        return probs_;
    }
    const DistributionMetadata &metadata() const {
        return metadata_;
    }
    DistributionMetadata &metadata() {
        return metadata_;
    }

    double total() const;
    std::optional<size_t> index_of(const ModeOccupation &outcome) const;
    /// 0 for outcomes outside the table.
    double probability(const ModeOccupation &outcome) const;
    bool is_normalized(double tol = 1e-9) const;

    /// Divides by the total. Throws NumericalError when every weight is zero.
    void renormalize();

   private:
    std::vector<ModeOccupation> outcomes_;
    std::vector<double> probs_;
    std::map<ModeOccupation, size_t> index_;
    DistributionMetadata metadata_;
};

/// Counts drawn from a distribution.
struct SampleRecord {
    std::map<ModeOccupation, uint64_t> counts;
    uint64_t total = 0;
    uint64_t seed = 0;

    /// Relative frequencies counts / total laid out on `reference`'s outcome list.
    OutcomeDistribution empirical(const OutcomeDistribution &reference) const;
};

/// Weights |Per(Lambda^(S,T))|^2 / (prod S! prod T!) for every S in `outcomes`.
/// With `renormalize`, weights are divided by their sum (post-selected relative frequencies).
OutcomeDistribution distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes,
    bool renormalize = true);

/// Same construction for identical fermions: |det Lambda^(S,T)|^2 over collision-free S.
OutcomeDistribution fermionic_distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes,
    bool renormalize = true);

/// Inverse-CDF sampling over the distribution's outcome order. Weights need not be normalized.
SampleRecord sample(const OutcomeDistribution &dist, uint64_t n_samples, uint64_t seed);

/// d = 1/2 sum_S |P1(S) - P2(S)|. Both tables must hold the same outcome set (any order).
double l1_distance(const OutcomeDistribution &p1, const OutcomeDistribution &p2);

struct CurvePoint {
    uint64_t samples = 0;
    double mean = 0;
    double stddev = 0;
};

/// For each sample size, draws `replicates` independent records and reports the mean and
/// sample standard deviation of d(empirical, dist). Replicate r of size index a uses
/// seed derive_seed(derive_seed(seed, a), r).
std::vector<CurvePoint> finite_sample_curve(
    const OutcomeDistribution &dist, const std::vector<uint64_t> &sample_sizes, size_t replicates, uint64_t seed);

}  // namespace bosonsim

#endif
