// Copyright 2026 The ctsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTSYNTH_PARALLEL_H_
#define CTSYNTH_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ctsynth {

// Name of the environment variable that sets the default worker count.
inline constexpr char kThreadsEnvVar[] = "CTSYNTH_THREADS";

// Worker count from CTSYNTH_THREADS, else hardware concurrency, else 1.
int DefaultThreadCount();

// Splits [0, count) into at most `threads` contiguous chunks and runs
// body(begin, end) on each. threads <= 0 means DefaultThreadCount().
// Blocks until every chunk finishes.
void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ctsynth

#endif  // CTSYNTH_PARALLEL_H_
