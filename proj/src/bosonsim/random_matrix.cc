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

#include "bosonsim/random_matrix.h"

#include <cmath>

namespace bosonsim {

ComplexMatrix random_complex_matrix(size_t n, CounterRng &rng) {
    auto k = static_cast<Eigen::Index>(n);
    ComplexMatrix a(k, k);
    const double scale = std::sqrt(0.5);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            double re = rng.normal();
            double im = rng.normal();
            a(r, c) = Complex(re * scale, im * scale);
        }
    }
    return a;
}

TransferMatrix haar_unitary(size_t m, CounterRng &rng) {
    ComplexMatrix z = random_complex_matrix(m, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        Complex d = r(i, i);
        double mag = std::abs(d);
        Complex phase = mag > 0 ? d / mag : Complex(1, 0);
        q.col(i) *= phase;
    }
    return TransferMatrix(std::move(q));
}

TransferMatrix random_subunitary(size_t m, CounterRng &rng, double min_singular_value) {
    ComplexMatrix w = haar_unitary(m, rng).entries();
    ComplexMatrix v = haar_unitary(m, rng).entries();
    Eigen::VectorXd s(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s(i) = min_singular_value + (1.0 - min_singular_value) * rng.uniform();
    }
    return TransferMatrix(w * s.cast<Complex>().asDiagonal() * v);
}

}  // namespace bosonsim
