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

#include "bosonsim/permanent.h"

#include <bit>
#include <stdexcept>
#include <string>

#include "bosonsim/parallel.h"

namespace bosonsim {

namespace {

void require_square(const ComplexMatrix &a, const char *what) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(what) + " needs a square matrix");
    }
}

// Depth-first over column choices with running partial products.
Complex naive_rec(const ComplexMatrix &a, Eigen::Index row, uint32_t used, Complex prefix) {
    Eigen::Index n = a.rows();
    if (row == n) {
        return prefix;
    }
    Complex sum = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
        if (!(used & (1u << c))) {
            sum += naive_rec(a, row + 1, used | (1u << c), prefix * a(row, c));
        }
    }
    return sum;
}

template <bool kCount>
Complex ryser(const ComplexMatrix &a, RyserCounters *counters) {
    require_square(a, "permanent_ryser");
    const size_t n = static_cast<size_t>(a.rows());
    if (n > kRyserPermanentMaxDim) {
        throw std::invalid_argument(
            "permanent_ryser supports n <= " + std::to_string(kRyserPermanentMaxDim) + ", got " + std::to_string(n));
    }
    if (n == 0) {
        return 1;
    }

    // Row sums and the accumulator are kept in extended precision; the row sums drift
    // by one rounding per Gray-code step otherwise.
    using Real = long double;
    std::vector<Real> col_re(n * n), col_im(n * n);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) {
            Complex v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            col_re[j * n + i] = v.real();
            col_im[j * n + i] = v.imag();
        }
    }
    std::vector<Real> sum_re(n, 0), sum_im(n, 0);
    Real acc_re = 0, acc_im = 0;

    const uint64_t steps = uint64_t{1} << n;
    uint64_t gray = 0;
    for (uint64_t k = 1; k < steps; ++k) {
        size_t j = static_cast<size_t>(std::countr_zero(k));
        gray ^= uint64_t{1} << j;
        const Real *cre = &col_re[j * n];
        const Real *cim = &col_im[j * n];
        if (gray & (uint64_t{1} << j)) {
            for (size_t i = 0; i < n; ++i) {
                sum_re[i] += cre[i];
                sum_im[i] += cim[i];
            }
        } else {
            for (size_t i = 0; i < n; ++i) {
                sum_re[i] -= cre[i];
                sum_im[i] -= cim[i];
            }
        }
        Real p_re = sum_re[0], p_im = sum_im[0];
        for (size_t i = 1; i < n; ++i) {
            Real re = p_re * sum_re[i] - p_im * sum_im[i];
            Real im = p_re * sum_im[i] + p_im * sum_re[i];
            p_re = re;
            p_im = im;
        }
        if (std::popcount(gray) & 1) {
            acc_re -= p_re;
            acc_im -= p_im;
        } else {
            acc_re += p_re;
            acc_im += p_im;
        }
        if constexpr (kCount) {
            counters->subsets += 1;
            counters->row_sum_updates += n;
            counters->multiplications += n - 1;
        }
    }
    if (n & 1) {
        acc_re = -acc_re;
        acc_im = -acc_im;
    }
    return Complex(static_cast<double>(acc_re), static_cast<double>(acc_im));
}

}  // namespace

Complex permanent_naive(const ComplexMatrix &a) {
    require_square(a, "permanent_naive");
    if (static_cast<size_t>(a.rows()) > kNaivePermanentMaxDim) {
        throw std::invalid_argument(
            "permanent_naive supports n <= " + std::to_string(kNaivePermanentMaxDim) + ", got " +
            std::to_string(a.rows()));
    }
    return naive_rec(a, 0, 0, Complex(1, 0));
}

Complex permanent_ryser(const ComplexMatrix &a) {
    return ryser<false>(a, nullptr);
}

Complex permanent_ryser(const ComplexMatrix &a, RyserCounters &counters) {
    return ryser<true>(a, &counters);
}

Complex determinant(const ComplexMatrix &a) {
    require_square(a, "determinant");
    ComplexMatrix m = a;
    Eigen::Index n = m.rows();
    Complex det = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        double best = std::abs(m(k, k));
        for (Eigen::Index r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > best) {
                best = std::abs(m(r, k));
                pivot = r;
            }
        }
        if (best == 0) {
            return 0;
        }
        if (pivot != k) {
            m.row(k).swap(m.row(pivot));
            det = -det;
        }
        det *= m(k, k);
        for (Eigen::Index r = k + 1; r < n; ++r) {
            Complex f = m(r, k) / m(k, k);
            m.row(r).tail(n - k) -= f * m.row(k).tail(n - k);
        }
    }
    return det;
}

std::vector<Complex> permanent_batch(std::span<const ComplexMatrix> matrices) {
    std::vector<Complex> out(matrices.size());
    parallel_for(matrices.size(), [&](size_t i) {
        try {
            out[i] = permanent_ryser(matrices[i]);
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("matrix " + std::to_string(i) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace bosonsim
