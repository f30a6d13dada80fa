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

#ifndef BOSONSIM_RNG_H
#define BOSONSIM_RNG_H

#include <cstdint>

namespace bosonsim {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
uint64_t splitmix64_mix(uint64_t z);

/// Deterministic child seed for stream `index` of `seed`.
uint64_t derive_seed(uint64_t seed, uint64_t index);

/// Counter-based generator. Output k of a stream is
///     splitmix64_mix(key + (k + 1) * 0x9E3779B97F4A7C15)
/// where key = splitmix64_mix(seed ^ splitmix64_mix(stream)). Because every output is a pure
/// function of (seed, stream, k), sequences are bit-identical on every platform and any
/// draw can be reproduced without replaying the ones before it.
class CounterRng {
   public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0);

    uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (one output per two uniforms).
    double normal();

    uint64_t counter() const {
        return counter_;
    }

    // UniformRandomBitGenerator surface, for std::shuffle and friends.
    using result_type = uint64_t;
    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return ~result_type{0};
    }
    result_type operator()() {
        return next_u64();
    }

   private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace bosonsim

#endif
