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

// Closed-form privacy accounting for the count-noise mechanisms.
//
// Neighbouring tables a, a' differ in one cell k with a'_k = a_k - 1. For
// each mechanism the likelihood ratio P(M(a) = b) / P(M(a') = b) depends on
// cell k alone, and (epsilon, delta)-probabilistic DP asks that it lie in
// [exp(-epsilon), exp(epsilon)] with probability at least 1 - delta.
//
// For the Poisson mechanism with pseudocount alpha the ratio is
//   exp(-1) * ((a_k + alpha) / (a_k - 1 + alpha))^b_k,
// so the two bounds become thresholds on b_k:
//   b_k >= (1 - epsilon) / log r   and   b_k <= (1 + epsilon) / log r,
// with r = (a_k + alpha) / (a_k - 1 + alpha) and b_k ~ Poisson(a_k + alpha).
// A Poisson CDF evaluated at a real x means P(X <= floor(x)).

#ifndef CTSYNTH_ACCOUNTING_H_
#define CTSYNTH_ACCOUNTING_H_

#include <cstdint>
#include <optional>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ctsynth {

struct PrivacyBudget {
  double epsilon;
  double delta;
};

// epsilon > 0 and 0 <= delta <= 1.
absl::Status ValidateBudget(const PrivacyBudget& budget);

// Probabilities that each side of the ratio bound holds.
struct RatioBounds {
  double lower_prob;  // P(ratio >= exp(-epsilon))
  double upper_prob;  // P(ratio <= exp(epsilon))
};

// P(X <= floor(x)) for X ~ Poisson(lambda), lambda > 0. Negative x gives 0.
absl::StatusOr<double> PoissonCdf(double x, double lambda);
// P(X > floor(x)), computed directly so small tails keep relative accuracy.
absl::StatusOr<double> PoissonSurvival(double x, double lambda);

// log of the Poisson likelihood ratio. Returns +infinity when
// a_k == 1, alpha == 0 and b_k > 0: the reduced table's cell has mean zero
// and cannot produce b_k.
absl::StatusOr<double> PoissonLogRatio(std::int64_t a_k, std::int64_t b_k,
                                       double alpha);
// exp(PoissonLogRatio); may be +infinity (see above, or on overflow).
absl::StatusOr<double> PoissonRatio(std::int64_t a_k, std::int64_t b_k,
                                    double alpha);

// (1 - epsilon) / log r and (1 + epsilon) / log r. Needs a_k - 1 + alpha > 0.
struct PoissonThresholds {
  double lower;
  double upper;
};
absl::StatusOr<PoissonThresholds> PoissonRatioThresholds(std::int64_t a_k,
                                                         double alpha,
                                                         double epsilon);

// P(b_k >= lower threshold). Exactly 1 for epsilon >= 1.
absl::StatusOr<double> PoissonLowerTailProb(std::int64_t a_k, double alpha,
                                            double epsilon);
// P(b_k <= upper threshold).
absl::StatusOr<double> PoissonUpperTailProb(std::int64_t a_k, double alpha,
                                            double epsilon);
absl::StatusOr<RatioBounds> PoissonRatioBounds(std::int64_t a_k, double alpha,
                                               double epsilon);

// delta for epsilon >= 1 and alpha > 0, taking the worst case a_k = 1:
//   1 - delta = F_{1+alpha}((1 + epsilon) / log((1 + alpha) / alpha)).
absl::StatusOr<double> PoissonDelta(double epsilon, double alpha);

// delta for alpha = 0 on a table with no zero cells, set by its smallest
// count m >= 1:  1 - delta = F_m((1 + epsilon) / log((m + 1) / m)).
absl::StatusOr<double> PoissonDeltaNoZeros(double epsilon,
                                           std::int64_t min_count);

// Conservative delta for 0 < epsilon < 1. Not a tight result: for each
// a_k in 1..a_max the failure probability is bounded by the union bound
// (1 - lower_prob) + (1 - upper_prob), and the maximum over a_k is
// returned, capped at 1.
absl::StatusOr<double> PoissonDeltaConservative(double epsilon, double alpha,
                                                std::int64_t a_max);

struct AlphaChoice {
  double alpha;
  double delta;
};

// Smallest alpha in an ascending grid with PoissonDelta(epsilon, alpha) <=
// delta_target, or nullopt if none qualifies. delta is not monotone in
// alpha, so every grid point is evaluated.
absl::StatusOr<std::optional<AlphaChoice>> AlphaForDelta(
    double epsilon, double delta_target, std::span<const double> alpha_grid);

// Gaussian mechanism:
//   1 - delta = Phi(sigma*eps - 1/(2 sigma)) - Phi(-sigma*eps - 1/(2 sigma)).
absl::StatusOr<double> GaussianDelta(double epsilon, double sigma);

// log ratio of Normal(a_k, sigma^2) and Normal(a_k - 1, sigma^2) densities
// at a pre-rounding value b.
double GaussianLogRatio(double a_k, double b, double sigma);

// Laplace ratio on integer outcomes: exp(epsilon) when b_k > a_k,
// exp(-epsilon) when b_k < a_k, 1 when equal.
absl::StatusOr<double> LaplaceRatio(std::int64_t a_k, std::int64_t b_k,
                                    double epsilon);

// log ratio of Laplace(a_k, 1/eps) and Laplace(a_k - 1, 1/eps) densities at
// a pre-rounding value b; always within [-epsilon, epsilon].
double LaplaceLogDensityRatio(double a_k, double b, double epsilon);

// Multinomial-Dirichlet ratio (b_k + a_k - 1 + alpha_k) / (a_k - 1 + alpha_k).
absl::StatusOr<double> DirichletRatio(std::int64_t a_k, std::int64_t b_k,
                                      double alpha_k);

// Smallest max_i alpha_i giving epsilon-DP on a table of n individuals:
// n / (exp(epsilon) - 1).
absl::StatusOr<double> DirichletMinConcentration(std::int64_t n,
                                                 double epsilon);

}  // namespace ctsynth

#endif  // CTSYNTH_ACCOUNTING_H_
