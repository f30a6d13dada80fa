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

#include "bosonsim/rng.h"

#include <cmath>
#include <numbers>

namespace bosonsim {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return splitmix64_mix(seed + kGolden * (splitmix64_mix(index) | 1));
}

CounterRng::CounterRng(uint64_t seed, uint64_t stream) : key_(splitmix64_mix(seed ^ splitmix64_mix(stream))) {
}

uint64_t CounterRng::next_u64() {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    // 1 - u1 lies in (0, 1], so the log is finite.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bosonsim
