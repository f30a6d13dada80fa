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

#include "bosonsim/parallel.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bosonsim {

size_t worker_count() {
    if (const char *env = std::getenv("BOSONSIM_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) {
                return static_cast<size_t>(v);
            }
        } catch (const std::exception &) {
        }
    }
    return std::max<size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(size_t n, const std::function<void(size_t)> &body) {
    size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    // Strided assignment keeps per-index work balanced when cost grows with i.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<size_t> error_index(workers, n);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                for (size_t i = w; i < n; i += workers) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        error_index[w] = i;
                        return;
                    }
                }
            });
        }
    }
    auto first = std::min_element(error_index.begin(), error_index.end());
    if (*first < n) {
        std::rethrow_exception(errors[static_cast<size_t>(first - error_index.begin())]);
    }
}

}  // namespace bosonsim
