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

#ifndef CTSYNTH_RNG_H_
#define CTSYNTH_RNG_H_

#include <cstdint>
#include <limits>

namespace ctsynth {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Identifies which consumer inside a mechanism owns a stream, so that two
// passes over the same cell (e.g. gamma draws then binomial splits) never
// share random words.
enum class StreamPurpose : std::uint64_t {
  kCellNoise = 1,
  kDirichletGamma = 2,
  kMultinomialSplit = 3,
  kAuditTrial = 4,
  kMicrodata = 5,
};

// Counter-based random stream. The n-th output is a pure function of
// (key, n), so a stream can be constructed for any (seed, purpose, index)
// without touching other streams. This is what makes parallel synthesis
// independent of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Stream for element `index` of `purpose` under `master_seed`.
  static CounterRng ForStream(std::uint64_t master_seed, StreamPurpose purpose,
                              std::uint64_t index) {
    std::uint64_t k = Mix64(master_seed ^ 0x6A09E667F3BCC909ULL);
    k = Mix64(k + static_cast<std::uint64_t>(purpose) * kGolden);
    k = Mix64(k ^ Mix64(index + kGolden));
    return CounterRng(k);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    ++counter_;
    return Mix64(key_ + counter_ * kGolden);
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double Uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ctsynth

#endif  // CTSYNTH_RNG_H_
