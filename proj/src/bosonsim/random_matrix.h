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

#ifndef BOSONSIM_RANDOM_MATRIX_H
#define BOSONSIM_RANDOM_MATRIX_H

#include "bosonsim/fock.h"
#include "bosonsim/rng.h"

namespace bosonsim {

/// Entries i.i.d. complex normal with unit variance (real and imaginary parts each 1/2).
ComplexMatrix random_complex_matrix(size_t n, CounterRng &rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal phases removed).
TransferMatrix haar_unitary(size_t m, CounterRng &rng);

/// W * diag(s) * V with W, V Haar and singular values s uniform in [min_singular_value, 1].
TransferMatrix random_subunitary(size_t m, CounterRng &rng, double min_singular_value = 0.3);

}  // namespace bosonsim

#endif
