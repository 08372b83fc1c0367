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

// Portable variate generators. The standard library distributions are
// implementation-defined, so output files would differ between toolchains;
// everything here is specified down to the uniform words consumed.

#ifndef CTSYNTH_SAMPLERS_H_
#define CTSYNTH_SAMPLERS_H_

#include <cstdint>

#include "ctsynth/rng.h"

namespace ctsynth {

// Means at or below this use sequential-search inversion; above it the
// transformed rejection method (PTRS) is used.
inline constexpr double kPoissonInversionCutoff = 10.0;

// Poisson(mean). mean == 0 returns 0.
std::uint64_t SamplePoisson(double mean, CounterRng& rng);

// Laplace(0, scale) by inversion.
double SampleLaplace(double scale, CounterRng& rng);

// Standard normal, Box-Muller (one output per two uniforms).
double SampleStandardNormal(CounterRng& rng);

// log of a Gamma(shape, 1) variate. Working in log space keeps very small
// shapes (which underflow to exactly 0 in linear space) usable.
double SampleLogGamma(double shape, CounterRng& rng);

double SampleGamma(double shape, CounterRng& rng);

double SampleBeta(double a, double b, CounterRng& rng);

// Binomial(trials, p). Large `trials` are reduced by beta order-statistic
// splitting, small ones by inversion, so the cost is O(log trials).
std::uint64_t SampleBinomial(std::uint64_t trials, double p, CounterRng& rng);

// Round half away from zero, then clamp below at zero.
std::uint64_t RoundAndClamp(double value);

}  // namespace ctsynth

#endif  // CTSYNTH_SAMPLERS_H_
