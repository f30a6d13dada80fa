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

#include "bosonsim/fock.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bosonsim {

ModeOccupation::ModeOccupation(std::vector<uint32_t> counts) : counts_(std::move(counts)) {
}

ModeOccupation::ModeOccupation(std::initializer_list<uint32_t> counts) : counts_(counts) {
}

ModeOccupation ModeOccupation::from_string(std::string_view digits) {
    std::vector<uint32_t> counts;
    counts.reserve(digits.size());
    for (char c : digits) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument("occupation string must contain only digits 0-9, got '" + std::string(digits) + "'");
        }
        counts.push_back(static_cast<uint32_t>(c - '0'));
    }
    if (counts.empty()) {
        throw std::invalid_argument("occupation string is empty");
    }
    return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::vacuum(size_t num_modes) {
    return ModeOccupation(std::vector<uint32_t>(num_modes, 0));
}

std::string ModeOccupation::str() const {
    std::string out;
    out.reserve(counts_.size());
    for (uint32_t c : counts_) {
        if (c > 9) {
            throw std::invalid_argument("occupations above 9 photons per mode have no digit-string form");
        }
        out.push_back(static_cast<char>('0' + c));
    }
    return out;
}

uint32_t ModeOccupation::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), uint32_t{0});
}

size_t ModeOccupation::num_occupied() const {
    return static_cast<size_t>(std::count_if(counts_.begin(), counts_.end(), [](uint32_t c) { return c > 0; }));
}

bool ModeOccupation::is_collision_free() const {
    return std::all_of(counts_.begin(), counts_.end(), [](uint32_t c) { return c <= 1; });
}

ModeOccupation ModeOccupation::click_pattern() const {
    std::vector<uint32_t> clicks(counts_.size());
    std::transform(counts_.begin(), counts_.end(), clicks.begin(), [](uint32_t c) { return c > 0 ? 1u : 0u; });
    return ModeOccupation(std::move(clicks));
}

std::vector<size_t> ModeOccupation::photon_modes() const {
    std::vector<size_t> modes;
    modes.reserve(total());
    for (size_t m = 0; m < counts_.size(); ++m) {
        modes.insert(modes.end(), counts_[m], m);
    }
    return modes;
}

ModeOccupation ModeOccupation::with_added(size_t mode, uint32_t photons) const {
    if (mode >= counts_.size()) {
        throw std::out_of_range("mode index out of range");
    }
    auto counts = counts_;
    counts[mode] += photons;
    return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::with_removed(size_t mode, uint32_t photons) const {
    if (mode >= counts_.size() || counts_[mode] < photons) {
        throw std::invalid_argument("cannot remove photons from mode " + std::to_string(mode));
    }
    auto counts = counts_;
    counts[mode] -= photons;
    return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::resized(size_t num_modes) const {
    auto counts = counts_;
    counts.resize(num_modes, 0);
    return ModeOccupation(std::move(counts));
}

ModeOccupation ModeOccupation::head(size_t num_modes) const {
    if (num_modes > counts_.size()) {
        throw std::out_of_range("head longer than occupation");
    }
    return ModeOccupation(std::vector<uint32_t>(counts_.begin(), counts_.begin() + static_cast<std::ptrdiff_t>(num_modes)));
}

TransferMatrix::TransferMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("transfer matrix must be square");
    }
    if (!entries_.allFinite()) {
        throw std::invalid_argument("transfer matrix has non-finite entries");
    }
}

TransferMatrix TransferMatrix::identity(size_t m) {
    auto n = static_cast<Eigen::Index>(m);
    return TransferMatrix(ComplexMatrix::Identity(n, n));
}

double TransferMatrix::max_singular_value() const {
    if (entries_.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(entries_);
    return svd.singularValues()(0);
}

bool TransferMatrix::is_unitary(double tol) const {
    ComplexMatrix defect = entries_ * entries_.adjoint() - ComplexMatrix::Identity(entries_.rows(), entries_.cols());
    return defect.cwiseAbs().maxCoeff() <= tol;
}

bool TransferMatrix::is_subunitary(double tol) const {
    return max_singular_value() <= 1 + tol;
}

void TransferMatrix::set_sigma(ElementUncertainty sigma) {
    if (sigma.magnitude.rows() != entries_.rows() || sigma.magnitude.cols() != entries_.cols() ||
        sigma.phase.rows() != entries_.rows() || sigma.phase.cols() != entries_.cols()) {
        throw std::invalid_argument("uncertainty shape does not match transfer matrix");
    }
    sigma_ = std::move(sigma);
}

namespace {

void enumerate_into(
    std::vector<uint32_t> &prefix, size_t num_modes, size_t remaining, bool collision_free,
    std::vector<ModeOccupation> &out) {
    size_t mode = prefix.size();
    if (mode + 1 == num_modes) {
        if (collision_free && remaining > 1) {
            return;
        }
        prefix.push_back(static_cast<uint32_t>(remaining));
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    size_t modes_after = num_modes - mode - 1;
    size_t hi = collision_free ? std::min<size_t>(1, remaining) : remaining;
    for (size_t c = hi + 1; c-- > 0;) {
        if (collision_free && remaining - c > modes_after) {
            break;
        }
        prefix.push_back(static_cast<uint32_t>(c));
        enumerate_into(prefix, num_modes, remaining - c, collision_free, out);
        prefix.pop_back();
    }
}

}  // namespace

uint64_t binomial(uint64_t n, uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    uint64_t r = 1;
    for (uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

uint64_t count_outcomes(size_t num_modes, size_t photons, bool collision_free) {
    if (collision_free) {
        return binomial(num_modes, photons);
    }
    if (num_modes == 0) {
        return photons == 0 ? 1 : 0;
    }
    return binomial(num_modes + photons - 1, photons);
}

std::vector<ModeOccupation> enumerate_outcomes(size_t num_modes, size_t photons, bool collision_free) {
    if (num_modes == 0) {
        throw std::invalid_argument("enumerate_outcomes needs at least one mode");
    }
    if (collision_free && photons > num_modes) {
        throw std::invalid_argument(
            "cannot place " + std::to_string(photons) + " photons collision-free in " + std::to_string(num_modes) +
            " modes");
    }
    std::vector<ModeOccupation> out;
    out.reserve(count_outcomes(num_modes, photons, collision_free));
    std::vector<uint32_t> prefix;
    prefix.reserve(num_modes);
    enumerate_into(prefix, num_modes, photons, collision_free, out);
    return out;
}

ComplexMatrix submatrix(const TransferMatrix &lambda, const ModeOccupation &output, const ModeOccupation &input) {
    size_t m = lambda.size();
    if (output.num_modes() != m || input.num_modes() != m) {
        throw std::invalid_argument(
            "occupation length does not match a " + std::to_string(m) + "-mode transfer matrix");
    }
    if (output.total() != input.total()) {
        throw std::invalid_argument(
            "photon number mismatch: output holds " + std::to_string(output.total()) + ", input holds " +
            std::to_string(input.total()));
    }
    auto rows = input.photon_modes();
    auto cols = output.photon_modes();
    auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix sub(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            sub(r, c) = lambda(rows[static_cast<size_t>(r)], cols[static_cast<size_t>(c)]);
        }
    }
    return sub;
}

uint64_t multiplicity_factor(const ModeOccupation &output, const ModeOccupation &input) {
    auto factorial = [](uint32_t k) {
        uint64_t f = 1;
        for (uint32_t i = 2; i <= k; ++i) {
            f *= i;
        }
        return f;
    };
    uint64_t r = 1;
    for (uint32_t c : output.counts()) {
        r *= factorial(c);
    }
    for (uint32_t c : input.counts()) {
        r *= factorial(c);
    }
    return r;
}

}  // namespace bosonsim
