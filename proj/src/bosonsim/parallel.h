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

#ifndef BOSONSIM_PARALLEL_H
#define BOSONSIM_PARALLEL_H

#include <cstddef>
#include <functional>

namespace bosonsim {

/// Worker count for internal parallel loops. Honors BOSONSIM_THREADS when set to a
/// positive integer; otherwise uses the hardware concurrency.
size_t worker_count();

/// Calls body(i) for every i in [0, n), possibly from several threads.
/// Each index is visited exactly once. If any call throws, the exception from the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(size_t n, const std::function<void(size_t)> &body);

}  // namespace bosonsim

#endif
