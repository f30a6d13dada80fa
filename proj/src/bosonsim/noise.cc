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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bosonsim/errors.h"

namespace bosonsim {

namespace {

double sum(const std::vector<double> &v) {
    double s = 0;
    for (double x : v) {
        s += x;
    }
    return s;
}

std::vector<double> normalized(std::vector<double> v, const char *what) {
    double s = sum(v);
    if (!(s > 0)) {
        throw NumericalError(std::string(what) + ": every probability is zero");
    }
    for (double &x : v) {
        x /= s;
    }
    return v;
}

// Raw click weights of `input` on `patterns` (system modes only), plus those on
// `lower` when non-null.
void accumulate_clicks(
    const DilationUnitary &circuit, const ModeOccupation &input, const std::vector<ModeOccupation> &patterns,
    std::vector<double> &out, const std::vector<ModeOccupation> *lower, std::vector<double> *lower_out) {
    auto full = full_output_distribution(circuit, input);
    std::map<ModeOccupation, size_t> where;
    for (size_t k = 0; k < patterns.size(); ++k) {
        where.emplace(patterns[k], k);
    }
    std::map<ModeOccupation, size_t> where_lower;
    if (lower) {
        for (size_t k = 0; k < lower->size(); ++k) {
            where_lower.emplace((*lower)[k], k);
        }
    }
    out.assign(patterns.size(), 0.0);
    if (lower_out) {
        lower_out->assign(lower ? lower->size() : 0, 0.0);
    }
    for (size_t k = 0; k < full.size(); ++k) {
        auto pattern = full.outcomes()[k].head(circuit.accessible).click_pattern();
        if (auto it = where.find(pattern); it != where.end()) {
            out[it->second] += full.probs()[k];
        } else if (lower) {
            if (auto jt = where_lower.find(pattern); jt != where_lower.end()) {
                (*lower_out)[jt->second] += full.probs()[k];
            }
        }
    }
}

std::vector<double> broadcast_rates(const std::vector<double> &rates, size_t modes) {
    if (rates.empty()) {
        return std::vector<double>(modes, 0.0);
    }
    if (rates.size() == 1) {
        return std::vector<double>(modes, rates[0]);
    }
    if (rates.size() != modes) {
        throw std::invalid_argument(
            "dark_rate has " + std::to_string(rates.size()) + " entries for " + std::to_string(modes) + " modes");
    }
    return rates;
}

}  // namespace

void NoiseParams::validate(size_t modes) const {
    if (!(alpha >= 0 && alpha <= 1)) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    for (const auto &s : sources) {
        if (!(s.lambda2 >= 0) || !std::isfinite(s.lambda2)) {
            throw std::invalid_argument("lambda2 must be finite and non-negative");
        }
        if (s.modes.empty()) {
            throw std::invalid_argument("a source must feed at least one mode");
        }
        for (size_t m : s.modes) {
            if (m >= modes) {
                throw std::invalid_argument("source mode " + std::to_string(m) + " out of range");
            }
        }
        if (s.truncation != 0 && s.truncation < s.pairs) {
            throw std::invalid_argument("source truncation below its pair number");
        }
    }
    for (double d : broadcast_rates(dark_rate, modes)) {
        if (!(d >= 0 && d < 1)) {
            throw std::invalid_argument("dark_rate must lie in [0, 1)");
        }
    }
    if (postselect_n == 0) {
        throw std::invalid_argument("postselect_N must be positive");
    }
}

bool NoiseParams::has_dark_counts() const {
    return std::any_of(dark_rate.begin(), dark_rate.end(), [](double d) { return d > 0; });
}

OutcomeDistribution aggregate_clicks(const OutcomeDistribution &occupations, size_t system_modes) {
    std::map<ModeOccupation, double, std::greater<>> acc;
    for (size_t k = 0; k < occupations.size(); ++k) {
        const auto &s = occupations.outcomes()[k];
        auto pattern = (system_modes ? s.head(system_modes) : s).click_pattern();
        acc[pattern] += occupations.probs()[k];
    }
    std::vector<ModeOccupation> outcomes;
    std::vector<double> probs;
    for (auto &[pattern, p] : acc) {
        outcomes.push_back(pattern);
        probs.push_back(p);
    }
    auto meta = occupations.metadata();
    meta.kind = OutcomeKind::kClickPattern;
    return OutcomeDistribution(std::move(outcomes), std::move(probs), std::move(meta));
}

OutcomeDistribution click_distribution(const OutcomeDistribution &occupations, size_t clicks) {
    if (occupations.size() == 0) {
        throw std::invalid_argument("empty occupation distribution");
    }
    const size_t modes = occupations.outcomes()[0].num_modes();
    auto patterns = enumerate_outcomes(modes, clicks, true);
    auto agg = aggregate_clicks(occupations);
    std::vector<double> probs(patterns.size());
    for (size_t k = 0; k < patterns.size(); ++k) {
        probs[k] = agg.probability(patterns[k]);
    }
    auto meta = occupations.metadata();
    meta.kind = OutcomeKind::kClickPattern;
    meta.postselection = std::to_string(clicks) + " clicks";
    OutcomeDistribution dist(std::move(patterns), normalized(std::move(probs), "click post-selection"), std::move(meta));
    return dist;
}

OutcomeDistribution raw_click_distribution(
    const DilationUnitary &circuit, const ModeOccupation &input, size_t clicks) {
    auto patterns = enumerate_outcomes(circuit.accessible, clicks, true);
    std::vector<double> probs;
    accumulate_clicks(circuit, input, patterns, probs, nullptr, nullptr);
    DistributionMetadata meta{input.head(circuit.accessible), "", std::to_string(clicks) + " clicks", OutcomeKind::kClickPattern};
    return OutcomeDistribution(std::move(patterns), std::move(probs), std::move(meta));
}

std::vector<MixtureTerm> higher_order_terms(
    const ModeOccupation &base, const std::vector<PdcSource> &sources, size_t postselect_n) {
    std::vector<uint32_t> claimed(base.num_modes(), 0);
    size_t reachable = base.total();
    for (const auto &s : sources) {
        if (s.truncation != 0 && s.truncation < s.pairs) {
            throw std::invalid_argument("source truncation below its pair number");
        }
        for (size_t m : s.modes) {
            if (m >= base.num_modes()) {
                throw std::invalid_argument("source mode " + std::to_string(m) + " out of range");
            }
            claimed[m] += s.pairs;
        }
        reachable += static_cast<size_t>(s.max_pairs() - s.pairs) * s.modes.size();
    }
    for (size_t m = 0; m < base.num_modes(); ++m) {
        if (claimed[m] > base[m]) {
            throw std::invalid_argument("sources claim more photons in mode " + std::to_string(m) + " than the input holds");
        }
    }
    if (reachable < postselect_n) {
        throw std::invalid_argument(
            "source truncation too low: at most " + std::to_string(reachable) + " photons for " +
            std::to_string(postselect_n) + "-fold post-selection");
    }
    std::vector<MixtureTerm> terms{{base, 1.0}};
    for (const auto &s : sources) {
        ModeOccupation input = base;
        double weight = 1;
        for (uint32_t k = s.pairs + 1; k <= s.max_pairs(); ++k) {
            for (size_t m : s.modes) {
                input = input.with_added(m);
            }
            weight *= s.lambda2;
            terms.push_back({input, weight});
        }
    }
    return terms;
}

OutcomeDistribution higher_order_mixture(
    const DilationUnitary &circuit, const ModeOccupation &base, const std::vector<PdcSource> &sources,
    size_t postselect_n) {
    auto terms = higher_order_terms(base, sources, postselect_n);
    auto patterns = enumerate_outcomes(circuit.accessible, postselect_n, true);
    std::vector<double> total(patterns.size(), 0.0);
    std::vector<double> raw;
    for (const auto &term : terms) {
        if (term.weight == 0) {
            continue;
        }
        accumulate_clicks(circuit, term.input, patterns, raw, nullptr, nullptr);
        for (size_t k = 0; k < raw.size(); ++k) {
            total[k] += term.weight * raw[k];
        }
    }
    DistributionMetadata meta{
        base.head(circuit.accessible), "", std::to_string(postselect_n) + " clicks", OutcomeKind::kClickPattern};
    return OutcomeDistribution(std::move(patterns), normalized(std::move(total), "higher-order mixture"), std::move(meta));
}

namespace {

// One photon from mode `d` distinguishable, the rest identical. Exact even when d holds
// several photons; the public entry point restricts it to singly occupied modes.
std::vector<double> one_distinguishable_raw(
    const TransferMatrix &lambda, const ModeOccupation &input, size_t d, const std::vector<ModeOccupation> &list) {
    const size_t m = lambda.size();
    const size_t n = input.total();
    auto rest = distribution(lambda, input.with_removed(d), enumerate_outcomes(m, n - 1, false), false);
    std::vector<double> probs(list.size(), 0.0);
    for (size_t k = 0; k < list.size(); ++k) {
        const auto &s = list[k];
        if (s.num_modes() != m || s.total() != n) {
            throw std::invalid_argument("outcome " + s.str() + " does not match the input");
        }
        double p = 0;
        for (size_t j = 0; j < m; ++j) {
            if (s[j] > 0) {
                p += std::norm(lambda(d, j)) * rest.probability(s.with_removed(j));
            }
        }
        probs[k] = p;
    }
    return probs;
}

}  // namespace

OutcomeDistribution distinguishable_distribution(
    const TransferMatrix &lambda, const ModeOccupation &input, size_t which,
    const std::optional<std::vector<ModeOccupation>> &outcomes, bool renormalize) {
    if (input.num_modes() != lambda.size()) {
        throw std::invalid_argument("input occupation does not match the matrix size");
    }
    const size_t n = input.total();
    if (which >= n) {
        throw std::invalid_argument("photon index " + std::to_string(which) + " out of range for " + std::to_string(n) + " photons");
    }
    const size_t d = input.photon_modes()[which];
    if (input[d] > 1) {
        throw std::invalid_argument("the distinguishable photon's input mode " + std::to_string(d) + " holds several photons");
    }
    auto list = outcomes ? *outcomes : enumerate_outcomes(lambda.size(), n, false);
    auto probs = one_distinguishable_raw(lambda, input, d, list);
    DistributionMetadata meta{input, "", "photon " + std::to_string(which) + " distinguishable", OutcomeKind::kOccupation};
    OutcomeDistribution dist(std::move(list), std::move(probs), std::move(meta));
    if (renormalize) {
        dist.renormalize();
    }
    return dist;
}

DistinguishabilityWeights distinguishability_weights(double alpha, size_t photons) {
    if (!(alpha >= 0 && alpha <= 1)) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    if (photons == 0) {
        throw std::invalid_argument("no photons");
    }
    const double a2 = alpha * alpha;
    DistinguishabilityWeights w;
    w.ideal = std::pow(a2, static_cast<double>(photons));
    w.per_photon = std::pow(a2, static_cast<double>(photons - 1)) * (1 - a2);
    return w;
}

OutcomeDistribution partial_distinguishability_mixture(
    const TransferMatrix &lambda, const ModeOccupation &input, double alpha,
    const std::optional<std::vector<ModeOccupation>> &outcomes) {
    const size_t n = input.total();
    auto w = distinguishability_weights(alpha, n);
    auto list = outcomes ? *outcomes : enumerate_outcomes(lambda.size(), n, false);
    auto ideal = distribution(lambda, input, list, false);
    std::vector<double> probs(list.size());
    for (size_t k = 0; k < list.size(); ++k) {
        probs[k] = w.ideal * ideal.probs()[k];
    }
    if (w.per_photon > 0) {
        if (input.num_modes() != lambda.size()) {
            throw std::invalid_argument("input occupation does not match the matrix size");
        }
        for (size_t d : input.photon_modes()) {
            auto part = one_distinguishable_raw(lambda, input, d, list);
            for (size_t k = 0; k < list.size(); ++k) {
                probs[k] += w.per_photon * part[k];
            }
        }
    }
    DistributionMetadata meta{input, "", "partial distinguishability", OutcomeKind::kOccupation};
    return OutcomeDistribution(std::move(list), normalized(std::move(probs), "distinguishability mixture"), std::move(meta));
}

OutcomeDistribution background_contribution(const DarkCountModel &model, const std::vector<ModeOccupation> &patterns) {
    if (patterns.empty()) {
        return OutcomeDistribution();
    }
    const size_t m = patterns[0].num_modes();
    auto rates = broadcast_rates(model.dark_rate, m);
    if (!(model.rate_ratio >= 0) || !std::isfinite(model.rate_ratio)) {
        throw std::invalid_argument("rate ratio must be finite and non-negative");
    }
    std::vector<double> b(patterns.size(), 0.0);
    for (size_t k = 0; k < patterns.size(); ++k) {
        const auto &s = patterns[k];
        for (size_t j = 0; j < m; ++j) {
            if (s[j] > 0 && rates[j] > 0) {
                b[k] += model.rate_ratio * rates[j] * model.lower.probability(s.with_removed(j));
            }
        }
    }
    DistributionMetadata meta{{}, "", "background", OutcomeKind::kClickPattern};
    return OutcomeDistribution(patterns, std::move(b), std::move(meta));
}

double rate_ratio_for_fraction(const DarkCountModel &model, const std::vector<ModeOccupation> &patterns, double fraction) {
    if (!(fraction >= 0 && fraction < 1)) {
        throw std::invalid_argument("background fraction must lie in [0, 1)");
    }
    DarkCountModel unit = model;
    unit.rate_ratio = 1;
    double b = background_contribution(unit, patterns).total();
    if (!(b > 0)) {
        if (fraction == 0) {
            return 0;
        }
        throw NumericalError("dark counts produce no background on these patterns");
    }
    return fraction / b;
}

OutcomeDistribution dark_count_adjust(
    const OutcomeDistribution &clicks, const DarkCountModel &model, DarkCountMode mode) {
    auto b = background_contribution(model, clicks.outcomes());
    const double big_b = b.total();
    if (!(big_b < 1)) {
        throw std::invalid_argument("background fraction must be below 1");
    }
    std::vector<double> out(clicks.size());
    for (size_t k = 0; k < clicks.size(); ++k) {
        const double p = clicks.probs()[k];
        const double bk = b.probs()[k];
        if (mode == DarkCountMode::kAdd) {
            out[k] = (1 - big_b) * p + bk;
        } else {
            double v = (p - bk) / (1 - big_b);
            if (v < -1e-9) {
                throw NumericalError(
                    "background subtraction gives " + std::to_string(v) + " for " + clicks.outcomes()[k].str() +
                    "; the dark-count model is inconsistent with the data");
            }
            out[k] = std::max(v, 0.0);
        }
    }
    auto meta = clicks.metadata();
    return OutcomeDistribution(clicks.outcomes(), normalized(std::move(out), "dark-count adjustment"), std::move(meta));
}

OutcomeDistribution ideal_click_distribution(const DilationUnitary &circuit, const ModeOccupation &input) {
    auto system = circuit.system_block();
    auto in = input.head(circuit.accessible);
    auto patterns = enumerate_outcomes(circuit.accessible, in.total(), true);
    auto dist = distribution(system, in, patterns, true);
    dist.metadata().kind = OutcomeKind::kClickPattern;
    dist.metadata().postselection = std::to_string(in.total()) + " clicks";
    return dist;
}

NoiseModel::NoiseModel(DilationUnitary circuit, ModeOccupation input, std::vector<PdcSource> sources, size_t postselect_n)
    : circuit_(std::move(circuit)),
      input_(std::move(input)),
      sources_(std::move(sources)),
      postselect_n_(postselect_n) {
    const size_t m = circuit_.accessible;
    input_ = input_.head(m);
    if (input_.total() != postselect_n_) {
        throw std::invalid_argument(
            "input holds " + std::to_string(input_.total()) + " photons but post-selection asks for " +
            std::to_string(postselect_n_));
    }
    auto terms = higher_order_terms(input_, sources_, postselect_n_);
    patterns_ = enumerate_outcomes(m, postselect_n_, true);
    lower_patterns_ = enumerate_outcomes(m, postselect_n_ - 1, true);
    auto system = circuit_.system_block();
    ideal_ = distribution(system, input_, patterns_, true);
    ideal_.metadata().kind = OutcomeKind::kClickPattern;
    ideal_.metadata().postselection = std::to_string(postselect_n_) + " clicks";
    ideal_raw_ = distribution(system, input_, patterns_, false).probs();
    for (size_t d : input_.photon_modes()) {
        distinguishable_raw_.push_back(one_distinguishable_raw(system, input_, d, patterns_));
    }
    std::vector<double> unused;
    accumulate_clicks(circuit_, input_, patterns_, unused, &lower_patterns_, &base_lower_raw_);
    size_t t = 1;
    for (size_t s = 0; s < sources_.size(); ++s) {
        const auto &src = sources_[s];
        for (uint32_t k = src.pairs + 1; k <= src.max_pairs(); ++k, ++t) {
            Component c;
            c.lambda_power = k - src.pairs;
            c.source = s;
            accumulate_clicks(circuit_, terms[t].input, patterns_, c.raw, &lower_patterns_, &c.raw_lower);
            components_.push_back(std::move(c));
        }
    }
}

OutcomeDistribution NoiseModel::evaluate(const NoiseParams &params) const {
    if (params.sources.size() != sources_.size()) {
        throw std::invalid_argument("noise parameters list a different number of sources than the model");
    }
    params.validate(circuit_.accessible);
    auto w = distinguishability_weights(params.alpha, postselect_n_);
    const double z = w.ideal + static_cast<double>(postselect_n_) * w.per_photon;
    std::vector<double> total(patterns_.size());
    for (size_t k = 0; k < patterns_.size(); ++k) {
        double p = w.ideal * ideal_raw_[k];
        for (const auto &part : distinguishable_raw_) {
            p += w.per_photon * part[k];
        }
        total[k] = p / z;
    }
    std::vector<double> lower = base_lower_raw_;
    for (const auto &c : components_) {
        const double weight = std::pow(params.sources[c.source].lambda2, c.lambda_power);
        if (weight == 0) {
            continue;
        }
        for (size_t k = 0; k < total.size(); ++k) {
            total[k] += weight * c.raw[k];
        }
        for (size_t k = 0; k < lower.size(); ++k) {
            lower[k] += weight * c.raw_lower[k];
        }
    }
    const double n_fold = sum(total);
    DistributionMetadata meta{input_, "", std::to_string(postselect_n_) + " clicks", OutcomeKind::kClickPattern};
    OutcomeDistribution p_mod(patterns_, normalized(std::move(total), "noise model"), meta);
    if (!params.has_dark_counts()) {
        return p_mod;
    }
    DarkCountModel dark;
    dark.dark_rate = params.dark_rate;
    dark.rate_ratio = sum(lower) / n_fold;
    dark.lower = OutcomeDistribution(lower_patterns_, normalized(std::move(lower), "lower-order coincidences"));
    return dark_count_adjust(p_mod, dark, DarkCountMode::kAdd);
}

OutcomeDistribution build_p_mod(const NoiseParams &params, const DilationUnitary &circuit, const ModeOccupation &input) {
    NoiseModel model(circuit, input, params.sources, params.postselect_n);
    return model.evaluate(params);
}

}  // namespace bosonsim
