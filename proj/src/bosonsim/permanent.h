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

#ifndef BOSONSIM_PERMANENT_H
#define BOSONSIM_PERMANENT_H

#include <cstdint>
#include <span>
#include <vector>

#include "bosonsim/fock.h"

namespace bosonsim {

constexpr size_t kNaivePermanentMaxDim = 11;
constexpr size_t kRyserPermanentMaxDim = 30;

/// Sum over all n! permutations. Reference implementation; n <= 11.
Complex permanent_naive(const ComplexMatrix &a);

/// Work done by one Ryser evaluation.
struct RyserCounters {
    uint64_t subsets = 0;
    uint64_t row_sum_updates = 0;
    uint64_t multiplications = 0;
};

/// Ryser inclusion-exclusion,
///     Per(A) = (-1)^n sum_{nonempty Q} (-1)^|Q| prod_i sum_{j in Q} A[i, j],
/// visiting column subsets in Gray-code order so that each step changes one column and
/// updates every row sum with a single add or subtract. O(2^n n). Per of the 0x0 matrix is 1.
/// n <= 30.
Complex permanent_ryser(const ComplexMatrix &a);
Complex permanent_ryser(const ComplexMatrix &a, RyserCounters &counters);

/// Gaussian elimination with partial pivoting. Singular input yields 0; det of 0x0 is 1.
Complex determinant(const ComplexMatrix &a);

/// Ryser permanent of every matrix, evaluated concurrently. Output order matches input
/// order regardless of scheduling. A failure is rethrown prefixed with its matrix index.
std::vector<Complex> permanent_batch(std::span<const ComplexMatrix> matrices);

}  // namespace bosonsim

#endif
