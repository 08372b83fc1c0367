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

#include "ctsynth/samplers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ctsynth {
namespace {

// Sequential search from zero. The iteration cap only matters when u lies
// within rounding distance of 1 and the running sum saturates below it.
std::uint64_t PoissonInversion(double mean, CounterRng& rng) {
  const double u = rng.Uniform();
  double pmf = std::exp(-mean);
  double cdf = pmf;
  std::uint64_t k = 0;
  while (u > cdf && k < 1000) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::uint64_t PoissonPtrs(double mean, CounterRng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.Uniform() - 0.5;
    const double v = rng.Uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

std::uint64_t BinomialInversion(std::uint64_t trials, double p,
                                CounterRng& rng) {
  if (p <= 0.0 || trials == 0) return 0;
  if (p >= 1.0) return trials;
  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;
  const double odds = q / (1.0 - q);
  const double u = rng.Uniform();
  double pmf = std::pow(1.0 - q, static_cast<double>(trials));
  double cdf = pmf;
  std::uint64_t k = 0;
  while (u > cdf && k < trials) {
    pmf *= odds * static_cast<double>(trials - k) / static_cast<double>(k + 1);
    ++k;
    cdf += pmf;
  }
  return flipped ? trials - k : k;
}

}  // namespace

std::uint64_t SamplePoisson(double mean, CounterRng& rng) {
  if (mean <= 0.0) return 0;
  if (mean <= kPoissonInversionCutoff) return PoissonInversion(mean, rng);
  return PoissonPtrs(mean, rng);
}

double SampleLaplace(double scale, CounterRng& rng) {
  const double u = rng.Uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double SampleStandardNormal(CounterRng& rng) {
  const double u1 = rng.Uniform();
  const double u2 = rng.Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SampleLogGamma(double shape, CounterRng& rng) {
  if (shape < 1.0) {
    // G(shape) = G(shape + 1) * U^(1/shape).
    const double boost = std::log(rng.Uniform()) / shape;
    return SampleLogGamma(shape + 1.0, rng) + boost;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = SampleStandardNormal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.Uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double SampleGamma(double shape, CounterRng& rng) {
  return std::exp(SampleLogGamma(shape, rng));
}

double SampleBeta(double a, double b, CounterRng& rng) {
  const double la = SampleLogGamma(a, rng);
  const double lb = SampleLogGamma(b, rng);
  // x / (x + y) evaluated without leaving log space.
  const double m = std::max(la, lb);
  const double ea = std::exp(la - m);
  const double eb = std::exp(lb - m);
  return ea / (ea + eb);
}

std::uint64_t SampleBinomial(std::uint64_t trials, double p, CounterRng& rng) {
  constexpr std::uint64_t kInversionTrials = 64;
  std::uint64_t result = 0;
  p = std::clamp(p, 0.0, 1.0);
  // Knuth, TAOCP vol. 2, 3.4.1: the a-th smallest of n uniforms is
  // Beta(a, n + 1 - a); recurse into whichever side of it p falls.
  while (trials > kInversionTrials && p > 0.0 && p < 1.0) {
    const std::uint64_t a = 1 + trials / 2;
    const std::uint64_t b = trials + 1 - a;
    const double x =
        SampleBeta(static_cast<double>(a), static_cast<double>(b), rng);
    if (x >= p) {
      trials = a - 1;
      p = p / x;
    } else {
      result += a;
      trials = b - 1;
      p = (p - x) / (1.0 - x);
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  return result + BinomialInversion(trials, p, rng);
}

std::uint64_t RoundAndClamp(double value) {
  // std::round rounds halfway cases away from zero.
  const double r = std::round(value);
  if (!(r > 0.0)) return 0;
  if (r >= 0x1.0p64) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(r);
}

}  // namespace ctsynth
