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

#include "ctsynth/accounting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_format.h"
#include "boost/math/special_functions/gamma.hpp"

namespace ctsynth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beyond this, floor(x) + 1 is not exactly representable.
constexpr double kMaxExactCount = 0x1.0p52;

absl::Status CheckLambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("poisson mean must be finite and > 0, got %g", lambda));
  }
  return absl::OkStatus();
}

absl::Status CheckEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and > 0, got %g", epsilon));
  }
  return absl::OkStatus();
}

absl::Status CheckAlpha(double alpha, bool allow_zero) {
  if (!std::isfinite(alpha) || alpha < 0.0 || (!allow_zero && alpha == 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and %s 0, got %g",
                        allow_zero ? ">=" : ">", alpha));
  }
  return absl::OkStatus();
}

// Validates a_k >= 1 and a_k - 1 + alpha > 0, returning a_k - 1 + alpha.
absl::StatusOr<double> ReducedMean(std::int64_t a_k, double alpha) {
  if (a_k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_k must be >= 1, got %d", a_k));
  }
  if (auto s = CheckAlpha(alpha, /*allow_zero=*/true); !s.ok()) return s;
  const double reduced = static_cast<double>(a_k - 1) + alpha;
  if (reduced <= 0.0) {
    return absl::InvalidArgumentError(
        "a_k - 1 + alpha must be > 0 (a_k = 1 with alpha = 0 makes the "
        "threshold log ratio undefined)");
  }
  return reduced;
}

// P(X <= k) and P(X > k) for integer k >= 0 via the regularized incomplete
// gamma function: P(X <= k) = Q(k + 1, lambda).
double CdfAt(double k, double lambda) {
  if (k < 0.0) return 0.0;
  if (k >= kMaxExactCount) return 1.0;
  return boost::math::gamma_q(k + 1.0, lambda);
}

double SurvivalAt(double k, double lambda) {
  if (k < 0.0) return 1.0;
  if (k >= kMaxExactCount) return 0.0;
  return boost::math::gamma_p(k + 1.0, lambda);
}

}  // namespace

absl::Status ValidateBudget(const PrivacyBudget& budget) {
  if (auto s = CheckEpsilon(budget.epsilon); !s.ok()) return s;
  if (!(budget.delta >= 0.0 && budget.delta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1], got %g", budget.delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> PoissonCdf(double x, double lambda) {
  if (auto s = CheckLambda(lambda); !s.ok()) return s;
  if (std::isnan(x)) return absl::InvalidArgumentError("x is NaN");
  return CdfAt(std::floor(x), lambda);
}

absl::StatusOr<double> PoissonSurvival(double x, double lambda) {
  if (auto s = CheckLambda(lambda); !s.ok()) return s;
  if (std::isnan(x)) return absl::InvalidArgumentError("x is NaN");
  return SurvivalAt(std::floor(x), lambda);
}

absl::StatusOr<double> PoissonLogRatio(std::int64_t a_k, std::int64_t b_k,
                                       double alpha) {
  if (a_k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_k must be >= 1, got %d", a_k));
  }
  if (b_k < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("b_k must be >= 0, got %d", b_k));
  }
  if (auto s = CheckAlpha(alpha, /*allow_zero=*/true); !s.ok()) return s;
  if (b_k == 0) return -1.0;
  const double reduced = static_cast<double>(a_k - 1) + alpha;
  if (reduced == 0.0) return kInf;
  return -1.0 + static_cast<double>(b_k) * std::log1p(1.0 / reduced);
}

absl::StatusOr<double> PoissonRatio(std::int64_t a_k, std::int64_t b_k,
                                    double alpha) {
  auto log_ratio = PoissonLogRatio(a_k, b_k, alpha);
  if (!log_ratio.ok()) return log_ratio.status();
  return std::exp(*log_ratio);
}

absl::StatusOr<PoissonThresholds> PoissonRatioThresholds(std::int64_t a_k,
                                                         double alpha,
                                                         double epsilon) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  auto reduced = ReducedMean(a_k, alpha);
  if (!reduced.ok()) return reduced.status();
  const double log_r = std::log1p(1.0 / *reduced);
  return PoissonThresholds{(1.0 - epsilon) / log_r, (1.0 + epsilon) / log_r};
}

absl::StatusOr<double> PoissonLowerTailProb(std::int64_t a_k, double alpha,
                                            double epsilon) {
  auto t = PoissonRatioThresholds(a_k, alpha, epsilon);
  if (!t.ok()) return t.status();
  if (epsilon >= 1.0) return 1.0;
  // b_k >= t  <=>  b_k > ceil(t) - 1; equals 1 - F(floor(t)) unless t is an
  // integer, where b_k = t still satisfies the bound.
  return SurvivalAt(std::ceil(t->lower) - 1.0,
                    static_cast<double>(a_k) + alpha);
}

absl::StatusOr<double> PoissonUpperTailProb(std::int64_t a_k, double alpha,
                                            double epsilon) {
  auto t = PoissonRatioThresholds(a_k, alpha, epsilon);
  if (!t.ok()) return t.status();
  return CdfAt(std::floor(t->upper), static_cast<double>(a_k) + alpha);
}

absl::StatusOr<RatioBounds> PoissonRatioBounds(std::int64_t a_k, double alpha,
                                               double epsilon) {
  auto lower = PoissonLowerTailProb(a_k, alpha, epsilon);
  if (!lower.ok()) return lower.status();
  auto upper = PoissonUpperTailProb(a_k, alpha, epsilon);
  if (!upper.ok()) return upper.status();
  return RatioBounds{*lower, *upper};
}

absl::StatusOr<double> PoissonDelta(double epsilon, double alpha) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (epsilon < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "PoissonDelta needs epsilon >= 1 (got %g); for 0 < epsilon < 1 only "
        "the conservative union bound PoissonDeltaConservative is available",
        epsilon));
  }
  if (auto s = CheckAlpha(alpha, /*allow_zero=*/false); !s.ok()) return s;
  auto t = PoissonRatioThresholds(1, alpha, epsilon);
  if (!t.ok()) return t.status();
  return SurvivalAt(std::floor(t->upper), 1.0 + alpha);
}

absl::StatusOr<double> PoissonDeltaNoZeros(double epsilon,
                                           std::int64_t min_count) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (epsilon < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "PoissonDeltaNoZeros needs epsilon >= 1, got %g", epsilon));
  }
  if (min_count < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "min_count must be >= 1 (got %d); tables with zero cells need "
        "alpha > 0 and PoissonDelta",
        min_count));
  }
  const double m = static_cast<double>(min_count);
  const double threshold = (1.0 + epsilon) / std::log1p(1.0 / m);
  return SurvivalAt(std::floor(threshold), m);
}

absl::StatusOr<double> PoissonDeltaConservative(double epsilon, double alpha,
                                                std::int64_t a_max) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (epsilon >= 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "PoissonDeltaConservative is for 0 < epsilon < 1 (got %g); use "
        "PoissonDelta",
        epsilon));
  }
  if (auto s = CheckAlpha(alpha, /*allow_zero=*/false); !s.ok()) return s;
  if (a_max < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_max must be >= 1, got %d", a_max));
  }
  double worst = 0.0;
  for (std::int64_t a = 1; a <= a_max; ++a) {
    auto t = PoissonRatioThresholds(a, alpha, epsilon);
    if (!t.ok()) return t.status();
    const double mean = static_cast<double>(a) + alpha;
    const double lower_fail = CdfAt(std::ceil(t->lower) - 1.0, mean);
    const double upper_fail = SurvivalAt(std::floor(t->upper), mean);
    worst = std::max(worst, lower_fail + upper_fail);
    if (worst >= 1.0) break;
  }
  return std::min(worst, 1.0);
}

absl::StatusOr<std::optional<AlphaChoice>> AlphaForDelta(
    double epsilon, double delta_target, std::span<const double> alpha_grid) {
  if (alpha_grid.empty()) {
    return absl::InvalidArgumentError("alpha grid is empty");
  }
  if (std::isnan(delta_target)) {
    return absl::InvalidArgumentError("delta target is NaN");
  }
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (auto s = CheckAlpha(alpha_grid[i], /*allow_zero=*/false); !s.ok()) {
      return s;
    }
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
      return absl::InvalidArgumentError(
          "alpha grid must be strictly ascending");
    }
  }
  for (double alpha : alpha_grid) {
    auto delta = PoissonDelta(epsilon, alpha);
    if (!delta.ok()) return delta.status();
    if (*delta <= delta_target) return AlphaChoice{alpha, *delta};
  }
  return std::optional<AlphaChoice>();
}

absl::StatusOr<double> GaussianDelta(double epsilon, double sigma) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and > 0, got %g", sigma));
  }
  // delta = 1 - Phi(u) + Phi(l) with u = s*e - 1/(2s), l = -s*e - 1/(2s),
  // written as two upper tails so neither term cancels.
  const double u = sigma * epsilon - 0.5 / sigma;
  const double l = sigma * epsilon + 0.5 / sigma;
  return 0.5 * std::erfc(u / std::numbers::sqrt2) +
         0.5 * std::erfc(l / std::numbers::sqrt2);
}

double GaussianLogRatio(double a_k, double b, double sigma) {
  return -(2.0 * a_k - 2.0 * b - 1.0) / (2.0 * sigma * sigma);
}

absl::StatusOr<double> LaplaceRatio(std::int64_t a_k, std::int64_t b_k,
                                    double epsilon) {
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (a_k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_k must be >= 1, got %d", a_k));
  }
  if (b_k > a_k) return std::exp(epsilon);
  if (b_k < a_k) return std::exp(-epsilon);
  return 1.0;
}

double LaplaceLogDensityRatio(double a_k, double b, double epsilon) {
  // Piecewise so the saturated branches are exactly +-epsilon.
  const double y = b - a_k;
  if (y >= 0.0) return epsilon;
  if (y <= -1.0) return -epsilon;
  return epsilon * (2.0 * y + 1.0);
}

absl::StatusOr<double> DirichletRatio(std::int64_t a_k, std::int64_t b_k,
                                      double alpha_k) {
  if (a_k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_k must be >= 1, got %d", a_k));
  }
  if (b_k < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("b_k must be >= 0, got %d", b_k));
  }
  if (!std::isfinite(alpha_k) || alpha_k <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha_k must be finite and > 0, got %g", alpha_k));
  }
  const double base = static_cast<double>(a_k - 1) + alpha_k;
  return 1.0 + static_cast<double>(b_k) / base;
}

absl::StatusOr<double> DirichletMinConcentration(std::int64_t n,
                                                 double epsilon) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n must be >= 1, got %d", n));
  }
  if (auto s = CheckEpsilon(epsilon); !s.ok()) return s;
  return static_cast<double>(n) / std::expm1(epsilon);
}

}  // namespace ctsynth
