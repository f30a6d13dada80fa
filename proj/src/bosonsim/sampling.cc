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

#include "bosonsim/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bosonsim/errors.h"
#include "bosonsim/parallel.h"
#include "bosonsim/permanent.h"
#include "bosonsim/rng.h"

namespace bosonsim {

namespace {

constexpr double kClampBelow = 1e-300;

void check_outcomes(const TransferMatrix &lambda, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes) {
    if (outcomes.empty()) {
        throw std::invalid_argument("outcome set is empty");
    }
    if (input.num_modes() != lambda.size()) {
        throw std::invalid_argument(
            "input occupation has " + std::to_string(input.num_modes()) + " modes but the matrix has " +
            std::to_string(lambda.size()));
    }
    for (const auto &s : outcomes) {
        if (s.num_modes() != lambda.size() || s.total() != input.total()) {
            throw std::invalid_argument(
                "outcome " + s.str() + " is incompatible with input " + input.str() + " on " +
                std::to_string(lambda.size()) + " modes");
        }
    }
}

std::vector<double> cumulative(const std::vector<double> &probs) {
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    return cdf;
}

size_t draw(const std::vector<double> &cdf, size_t last_nonzero, CounterRng &rng) {
    double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t k = static_cast<size_t>(it - cdf.begin());
    return std::min(k, last_nonzero);
}

size_t last_nonzero_index(const std::vector<double> &probs) {
    for (size_t k = probs.size(); k-- > 0;) {
        if (probs[k] > 0) {
            return k;
        }
    }
    return 0;
}

}  // namespace

OutcomeDistribution::OutcomeDistribution(
    std::vector<ModeOccupation> outcomes, std::vector<double> probs, DistributionMetadata metadata)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)), metadata_(std::move(metadata)) {
    if (outcomes_.size() != probs_.size()) {
        throw std::invalid_argument("outcome and probability lists differ in length");
    }
    for (size_t k = 0; k < outcomes_.size(); ++k) {
        if (!std::isfinite(probs_[k]) || probs_[k] < 0) {
            throw std::invalid_argument("probability for outcome " + outcomes_[k].str() + " is negative or non-finite");
        }
        if (probs_[k] < kClampBelow) {
            probs_[k] = 0;
        }
        if (k > 0 && outcomes_[k].num_modes() != outcomes_[0].num_modes()) {
            throw std::invalid_argument("outcomes have inconsistent mode counts");
        }
        if (!index_.emplace(outcomes_[k], k).second) {
            throw std::invalid_argument("duplicate outcome " + outcomes_[k].str());
        }
    }
}

double OutcomeDistribution::total() const {
    return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

std::optional<size_t> OutcomeDistribution::index_of(const ModeOccupation &outcome) const {
    auto it = index_.find(outcome);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double OutcomeDistribution::probability(const ModeOccupation &outcome) const {
    auto k = index_of(outcome);
    return k ? probs_[*k] : 0.0;
}

bool OutcomeDistribution::is_normalized(double tol) const {
    return std::abs(total() - 1.0) <= tol;
}

void OutcomeDistribution::renormalize() {
    double t = total();
    if (!(t > 0)) {
        throw NumericalError("cannot renormalize: every outcome has zero weight");
    }
    for (double &p : probs_) {
        p /= t;
        if (p < kClampBelow) {
            p = 0;
        }
    }
}

OutcomeDistribution SampleRecord::empirical(const OutcomeDistribution &reference) const {
    if (total == 0) {
        throw std::invalid_argument("empirical distribution of an empty sample record");
    }
    std::vector<double> freq(reference.size(), 0.0);
    for (const auto &[outcome, count] : counts) {
        auto k = reference.index_of(outcome);
        if (!k) {
            throw std::invalid_argument("sampled outcome " + outcome.str() + " is not in the reference outcome set");
        }
        freq[*k] = static_cast<double>(count) / static_cast<double>(total);
    }
    auto meta = reference.metadata();
    meta.postselection += meta.postselection.empty() ? "empirical" : "; empirical";
    return OutcomeDistribution(reference.outcomes(), std::move(freq), std::move(meta));
}

OutcomeDistribution distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes,
    bool renormalize) {
    check_outcomes(lambda, input, outcomes);
    std::vector<ComplexMatrix> subs;
    subs.reserve(outcomes.size());
    for (const auto &s : outcomes) {
        subs.push_back(submatrix(lambda, s, input));
    }
    auto perms = permanent_batch(subs);
    std::vector<double> weights(outcomes.size());
    for (size_t k = 0; k < outcomes.size(); ++k) {
        weights[k] = std::norm(perms[k]) / static_cast<double>(multiplicity_factor(outcomes[k], input));
    }
    DistributionMetadata meta{input, "", renormalize ? "renormalized" : "raw", OutcomeKind::kOccupation};
    OutcomeDistribution dist(outcomes, std::move(weights), std::move(meta));
    if (renormalize) {
        dist.renormalize();
    }
    return dist;
}

OutcomeDistribution fermionic_distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes,
    bool renormalize) {
    check_outcomes(lambda, input, outcomes);
    if (!input.is_collision_free()) {
        throw std::invalid_argument("fermionic input " + input.str() + " has a doubly occupied mode");
    }
    std::vector<double> weights(outcomes.size());
    for (size_t k = 0; k < outcomes.size(); ++k) {
        if (!outcomes[k].is_collision_free()) {
            throw std::invalid_argument("fermionic outcome " + outcomes[k].str() + " has a doubly occupied mode");
        }
        weights[k] = std::norm(determinant(submatrix(lambda, outcomes[k], input)));
    }
    DistributionMetadata meta{input, "", renormalize ? "fermionic renormalized" : "fermionic raw", OutcomeKind::kOccupation};
    OutcomeDistribution dist(outcomes, std::move(weights), std::move(meta));
    if (renormalize) {
        dist.renormalize();
    }
    return dist;
}

SampleRecord sample(const OutcomeDistribution &dist, uint64_t n_samples, uint64_t seed) {
    SampleRecord record;
    record.seed = seed;
    if (n_samples == 0) {
        return record;
    }
    if (dist.size() == 0 || !(dist.total() > 0)) {
        throw NumericalError("cannot sample from a distribution with no weight");
    }
    auto cdf = cumulative(dist.probs());
    size_t last = last_nonzero_index(dist.probs());
    std::vector<uint64_t> counts(dist.size(), 0);
    CounterRng rng(seed);
    for (uint64_t s = 0; s < n_samples; ++s) {
        counts[draw(cdf, last, rng)] += 1;
    }
    for (size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > 0) {
            record.counts.emplace(dist.outcomes()[k], counts[k]);
        }
    }
    record.total = n_samples;
    return record;
}

double l1_distance(const OutcomeDistribution &p1, const OutcomeDistribution &p2) {
    if (p1.size() != p2.size()) {
        throw std::invalid_argument(
            "outcome sets differ: " + std::to_string(p1.size()) + " vs " + std::to_string(p2.size()) + " outcomes");
    }
    double d = 0;
    for (size_t k = 0; k < p1.size(); ++k) {
        auto j = p2.index_of(p1.outcomes()[k]);
        if (!j) {
            throw std::invalid_argument("outcome " + p1.outcomes()[k].str() + " missing from second distribution");
        }
        d += std::abs(p1.probs()[k] - p2.probs()[*j]);
    }
    return 0.5 * d;
}

std::vector<CurvePoint> finite_sample_curve(
    const OutcomeDistribution &dist, const std::vector<uint64_t> &sample_sizes, size_t replicates, uint64_t seed) {
    if (replicates < 1) {
        throw std::invalid_argument("finite_sample_curve needs at least one replicate");
    }
    if (dist.size() == 0 || !(dist.total() > 0)) {
        throw NumericalError("cannot sample from a distribution with no weight");
    }
    std::vector<double> probs = dist.probs();
    double t = dist.total();
    for (double &p : probs) {
        p /= t;
    }
    auto cdf = cumulative(probs);
    size_t last = last_nonzero_index(probs);

    std::vector<CurvePoint> curve;
    curve.reserve(sample_sizes.size());
    for (size_t a = 0; a < sample_sizes.size(); ++a) {
        uint64_t n = sample_sizes[a];
        if (n == 0) {
            throw std::invalid_argument("finite_sample_curve sample sizes must be positive");
        }
        uint64_t size_seed = derive_seed(seed, a);
        std::vector<double> d(replicates);
        parallel_for(replicates, [&](size_t r) {
            CounterRng rng(derive_seed(size_seed, r));
            std::vector<uint64_t> counts(probs.size(), 0);
            for (uint64_t s = 0; s < n; ++s) {
                counts[draw(cdf, last, rng)] += 1;
            }
            double acc = 0;
            for (size_t k = 0; k < probs.size(); ++k) {
                acc += std::abs(static_cast<double>(counts[k]) / static_cast<double>(n) - probs[k]);
            }
            d[r] = 0.5 * acc;
        });
        double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(replicates);
        double ss = 0;
        for (double x : d) {
            ss += (x - mean) * (x - mean);
        }
        double stddev = replicates > 1 ? std::sqrt(ss / static_cast<double>(replicates - 1)) : 0.0;
        curve.push_back({n, mean, stddev});
    }
    return curve;
}

}  // namespace bosonsim
