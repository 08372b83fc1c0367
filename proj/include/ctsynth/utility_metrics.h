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

// Utility summaries of synthetic tables and risk-curve tabulation.

#ifndef CTSYNTH_UTILITY_METRICS_H_
#define CTSYNTH_UTILITY_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctsynth/mechanisms.h"
#include "ctsynth/table.h"

namespace ctsynth {

struct CountRange {
  std::int64_t lo = 1;
  std::int64_t hi = 10;
};

// Signed percentage differences 100 * (b - a) / a over all cells whose
// original count is exactly `count`, pooled over replicates.
struct BucketSummary {
  std::int64_t count = 0;
  std::vector<double> values;  // sorted ascending
  // Five-number summary (linear-interpolation quantiles) and mean; NaN when
  // the bucket is empty.
  double min, q1, median, q3, max, mean;
  // Mean of |values| and its standard error.
  double mean_abs, mean_abs_std_error;

  std::size_t size() const { return values.size(); }
};

struct UtilityReport {
  CountRange range;
  std::vector<BucketSummary> buckets;  // one per count in [lo, hi]
};

// Every synthetic replicate must share the original's schema. range.lo >= 1
// since zero counts have no percentage difference.
absl::StatusOr<UtilityReport> PercentageDifferences(
    const ContingencyTable& original,
    std::span<const ContingencyTable> synthetic, CountRange range = {});
absl::StatusOr<UtilityReport> PercentageDifferences(
    const ContingencyTable& original, const SyntheticTable& synthetic,
    CountRange range = {});

// Rows "count,min,q1,median,q3,max,mean,n"; empty buckets print NA fields
// and n = 0.
std::string FormatUtilityReport(const UtilityReport& report);

// (1 / K) * sum_i |b_i - a_i|.
absl::StatusOr<double> MeanAbsoluteDeviation(const ContingencyTable& original,
                                             const ContingencyTable& synthetic);

struct RiskPoint {
  double alpha;
  double epsilon;
  double delta;
};

struct RiskCurve {
  std::vector<RiskPoint> points;
};

// PoissonDelta over the grid, epsilon-major. Every epsilon must be >= 1 and
// every alpha > 0.
absl::StatusOr<RiskCurve> ComputeRiskCurve(std::span<const double> epsilons,
                                           std::span<const double> alphas);

// Rows "alpha,epsilon,delta".
std::string FormatRiskCurve(const RiskCurve& curve);

// Linear-interpolation quantile of sorted data (R type 7).
double Quantile(std::span<const double> sorted, double q);

}  // namespace ctsynth

#endif  // CTSYNTH_UTILITY_METRICS_H_
