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

#ifndef BOSONSIM_ERRORS_H
#define BOSONSIM_ERRORS_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bosonsim {

/// A computation was well-posed but produced no usable numeric result
/// (e.g. renormalizing an all-zero weight vector).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver finished without reaching its acceptance threshold.
struct ConvergenceError : NumericalError {
    ConvergenceError(const std::string &message, double residual)
        : NumericalError(message), residual(residual) {
    }
    double residual;
};

/// A least-squares system has fewer independent constraints than unknowns.
struct UnderdeterminedError : std::invalid_argument {
    UnderdeterminedError(const std::string &message, size_t rank, size_t unknowns)
        : std::invalid_argument(message), rank(rank), unknowns(unknowns) {
    }
    size_t missing() const {
        return unknowns - rank;
    }
    size_t rank;
    size_t unknowns;
};

}  // namespace bosonsim

#endif
