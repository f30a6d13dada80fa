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

#ifndef BOSONSIM_FOCK_H
#define BOSONSIM_FOCK_H

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bosonsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Photon counts per mode. Used both for input states |T> and detection outcomes |S>.
///
/// Ordering is lexicographic on the count vector. Outcome tables are emitted in
/// descending order, so (2,0) precedes (1,1) precedes (0,2).
class ModeOccupation {
   public:
    ModeOccupation() = default;
    explicit ModeOccupation(std::vector<uint32_t> counts);
    ModeOccupation(std::initializer_list<uint32_t> counts);

    /// Parses a digit string such as "011010". Each character is one mode.
    static ModeOccupation from_string(std::string_view digits);
    static ModeOccupation vacuum(size_t num_modes);

    /// Inverse of from_string. Throws if any mode holds more than 9 photons.
    std::string str() const;

    size_t num_modes() const {
        return counts_.size();
    }
    uint32_t operator[](size_t mode) const {
        return counts_[mode];
    }
    std::span<const uint32_t> counts() const {
        return counts_;
    }
    uint32_t total() const;
    size_t num_occupied() const;
    bool is_collision_free() const;

    /// Threshold-detector view: every occupied mode becomes 1.
    ModeOccupation click_pattern() const;

    /// One entry per photon giving its mode, ascending.
    std::vector<size_t> photon_modes() const;

    ModeOccupation with_added(size_t mode, uint32_t photons = 1) const;
    ModeOccupation with_removed(size_t mode, uint32_t photons = 1) const;
    ModeOccupation resized(size_t num_modes) const;
    ModeOccupation head(size_t num_modes) const;

    auto operator<=>(const ModeOccupation &) const = default;
    bool operator==(const ModeOccupation &) const = default;

   private:
    std::vector<uint32_t> counts_;
};

/// Per-element standard deviations of a characterized transfer matrix.
struct ElementUncertainty {
    Eigen::MatrixXd magnitude;
    Eigen::MatrixXd phase;
};

/// Linear map from input-mode to output-mode creation operators:
/// a_i^dagger = sum_j entries(i, j) b_j^dagger. Row = input, column = output.
class TransferMatrix {
   public:
    TransferMatrix() = default;
    explicit TransferMatrix(ComplexMatrix entries);
    static TransferMatrix identity(size_t m);

    size_t dim_in() const {
        return static_cast<size_t>(entries_.rows());
    }
    size_t dim_out() const {
        return static_cast<size_t>(entries_.cols());
    }
    size_t size() const {
        return dim_in();
    }
    const ComplexMatrix &entries() const {
        return entries_;
    }
    Complex operator()(size_t in, size_t out) const {
        return entries_(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
    }

    double max_singular_value() const;
    /// Lambda * Lambda^dagger equals the identity within `tol` (max-abs entry error).
    bool is_unitary(double tol = 1e-10) const;
    bool is_subunitary(double tol = 1e-10) const;

    const std::optional<ElementUncertainty> &sigma() const {
        return sigma_;
    }
    void set_sigma(ElementUncertainty sigma);

   private:
    ComplexMatrix entries_;
    std::optional<ElementUncertainty> sigma_;
};

/// All occupations of `num_modes` modes holding `photons` photons, in descending
/// lexicographic order. With `collision_free`, only 0/1 occupations are kept.
std::vector<ModeOccupation> enumerate_outcomes(size_t num_modes, size_t photons, bool collision_free);

/// Number of outcomes enumerate_outcomes would return, without building them.
uint64_t count_outcomes(size_t num_modes, size_t photons, bool collision_free);

/// The N x N matrix made of row i repeated T_i times and column j repeated S_j times.
/// Repeated rows (columns) are adjacent and in mode order.
ComplexMatrix submatrix(const TransferMatrix &lambda, const ModeOccupation &output, const ModeOccupation &input);

/// prod_j S_j! * prod_i T_i!
uint64_t multiplicity_factor(const ModeOccupation &output, const ModeOccupation &input);

uint64_t binomial(uint64_t n, uint64_t k);

}  // namespace bosonsim

#endif
