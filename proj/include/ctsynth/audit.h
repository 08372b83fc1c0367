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

// Verification that mechanisms meet their (epsilon, delta)-probabilistic DP
// claims, by exact computation and by Monte Carlo simulation.
//
// Only the differing cell k is simulated: every mechanism's likelihood ratio
// between neighbouring tables depends on cell k alone (for the multinomial
// mechanism, on b_k and the table total), so the other cells cancel.

#ifndef CTSYNTH_AUDIT_H_
#define CTSYNTH_AUDIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctsynth/mechanisms.h"

namespace ctsynth {

// Acceptance band half-width, in standard errors.
inline constexpr double kAuditBandSigmas = 4.0;

struct AuditConfig {
  MechanismSpec mechanism;
  double epsilon = 1.0;
  std::int64_t trials = 100'000;
  std::vector<std::int64_t> a_values;
  std::uint64_t seed = 0;
  // Laplace and Gaussian only: judge the released integer count (after
  // rounding and clamping) instead of the continuous pre-rounding value.
  // No analytic rate exists for this case.
  bool post_rounding = false;
  // Dirichlet only: table total n. Cell k uses concentrations[0]; the
  // remaining concentrations are pooled as the rest of the table.
  std::int64_t dirichlet_total = 0;
  int threads = 1;
};

struct PassRate {
  double rate;
  double std_error;  // sqrt(rate * (1 - rate) / trials)
};

// Fraction of trials whose exact likelihood ratio lies in
// [exp(-epsilon), exp(epsilon)], with b_k drawn from the mechanism applied
// to a_k.
absl::StatusOr<PassRate> MonteCarloPassRate(const AuditConfig& config,
                                            std::int64_t a_k);

// Exact P(ceil(lower) <= b_k <= floor(upper)) for b_k ~ Poisson(a_k + alpha),
// i.e. the probability both ratio bounds hold for this a_k.
absl::StatusOr<double> ExactPassRatePoisson(std::int64_t a_k, double alpha,
                                            double epsilon);

// Exact pass rate when one is available for the configured mechanism;
// nullopt for post-rounding audits.
absl::StatusOr<std::optional<double>> AnalyticPassRate(
    const AuditConfig& config, std::int64_t a_k);

struct WorstCase {
  std::int64_t a_k;
  double pass_rate;
};

// Minimizes ExactPassRatePoisson over a_k = 1..a_max; ties go to the
// smallest a_k.
absl::StatusOr<WorstCase> WorstCaseScan(double alpha, double epsilon,
                                        std::int64_t a_max);

struct AuditRow {
  std::int64_t a_k;
  double empirical;
  std::optional<double> analytic;
  double std_error;
  // |empirical - analytic| <= kAuditBandSigmas * SE, where SE is the larger
  // of the empirical standard error and sqrt(p (1 - p) / trials) at the
  // analytic p. Absent without an analytic rate.
  std::optional<bool> passed;
};

struct AuditReport {
  std::string mechanism;
  double epsilon;
  std::int64_t trials;
  std::uint64_t seed;
  bool post_rounding;
  std::vector<AuditRow> rows;
  // a_k with the lowest empirical pass rate (smallest on ties).
  std::int64_t worst_case_a;
};

absl::StatusOr<AuditReport> RunAudit(const AuditConfig& config);

// '#' comment header followed by rows "a_k,empirical,analytic,std_error,pass".
// Missing values print as NA.
std::string FormatAuditReport(const AuditReport& report);

}  // namespace ctsynth

#endif  // CTSYNTH_AUDIT_H_
