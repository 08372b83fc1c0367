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

#include "ctsynth/utility_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ctsynth/accounting.h"

namespace ctsynth {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

absl::Status CheckSameSchema(const ContingencyTable& a,
                             const ContingencyTable& b) {
  if (!(a.schema() == b.schema())) {
    return absl::InvalidArgumentError(
        "original and synthetic tables have different schemas");
  }
  return absl::OkStatus();
}

void Summarize(BucketSummary& bucket) {
  auto& v = bucket.values;
  std::sort(v.begin(), v.end());
  if (v.empty()) {
    bucket.min = bucket.q1 = bucket.median = bucket.q3 = bucket.max = kNaN;
    bucket.mean = bucket.mean_abs = bucket.mean_abs_std_error = kNaN;
    return;
  }
  const double n = static_cast<double>(v.size());
  bucket.min = v.front();
  bucket.max = v.back();
  bucket.q1 = Quantile(v, 0.25);
  bucket.median = Quantile(v, 0.5);
  bucket.q3 = Quantile(v, 0.75);
  bucket.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double abs_sum = 0.0;
  for (double x : v) abs_sum += std::fabs(x);
  bucket.mean_abs = abs_sum / n;
  double ss = 0.0;
  for (double x : v) {
    const double d = std::fabs(x) - bucket.mean_abs;
    ss += d * d;
  }
  bucket.mean_abs_std_error =
      v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

std::string Field(double x) {
  return std::isnan(x) ? std::string("NA") : absl::StrFormat("%.6f", x);
}

}  // namespace

double Quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

absl::StatusOr<UtilityReport> PercentageDifferences(
    const ContingencyTable& original,
    std::span<const ContingencyTable> synthetic, CountRange range) {
  if (range.lo < 1 || range.hi < range.lo) {
    return absl::InvalidArgumentError(
        absl::StrFormat("count range must satisfy 1 <= lo <= hi, got [%d, %d]",
                        range.lo, range.hi));
  }
  if (synthetic.empty()) {
    return absl::InvalidArgumentError("no synthetic tables given");
  }
  for (const ContingencyTable& s : synthetic) {
    if (auto st = CheckSameSchema(original, s); !st.ok()) return st;
  }
  UtilityReport report{range, {}};
  report.buckets.resize(static_cast<std::size_t>(range.hi - range.lo + 1));
  for (std::size_t i = 0; i < report.buckets.size(); ++i) {
    report.buckets[i].count = range.lo + static_cast<std::int64_t>(i);
  }
  for (const ContingencyTable& s : synthetic) {
    for (CellIndex cell = 0; cell < original.num_cells(); ++cell) {
      const auto a = static_cast<std::int64_t>(original.count(cell));
      if (a < range.lo || a > range.hi) continue;
      const double b = static_cast<double>(s.count(cell));
      const double ad = static_cast<double>(a);
      report.buckets[static_cast<std::size_t>(a - range.lo)].values.push_back(
          100.0 * (b - ad) / ad);
    }
  }
  for (BucketSummary& bucket : report.buckets) Summarize(bucket);
  return report;
}

absl::StatusOr<UtilityReport> PercentageDifferences(
    const ContingencyTable& original, const SyntheticTable& synthetic,
    CountRange range) {
  return PercentageDifferences(
      original, std::span<const ContingencyTable>(&synthetic.table, 1), range);
}

std::string FormatUtilityReport(const UtilityReport& report) {
  std::string out = "count,min,q1,median,q3,max,mean,n\n";
  for (const BucketSummary& b : report.buckets) {
    absl::StrAppend(&out, b.count, ",", Field(b.min), ",", Field(b.q1), ",",
                    Field(b.median), ",", Field(b.q3), ",", Field(b.max), ",",
                    Field(b.mean), ",", b.size(), "\n");
  }
  return out;
}

absl::StatusOr<double> MeanAbsoluteDeviation(
    const ContingencyTable& original, const ContingencyTable& synthetic) {
  if (auto st = CheckSameSchema(original, synthetic); !st.ok()) return st;
  double total = 0.0;
  for (CellIndex cell = 0; cell < original.num_cells(); ++cell) {
    const Count a = original.count(cell);
    const Count b = synthetic.count(cell);
    total += static_cast<double>(a > b ? a - b : b - a);
  }
  return total / static_cast<double>(original.num_cells());
}

absl::StatusOr<RiskCurve> ComputeRiskCurve(std::span<const double> epsilons,
                                           std::span<const double> alphas) {
  if (epsilons.empty() || alphas.empty()) {
    return absl::InvalidArgumentError(
        "risk curve needs at least one epsilon and one alpha");
  }
  RiskCurve curve;
  curve.points.reserve(epsilons.size() * alphas.size());
  for (double eps : epsilons) {
    for (double alpha : alphas) {
      auto delta = PoissonDelta(eps, alpha);
      if (!delta.ok()) return delta.status();
      curve.points.push_back({alpha, eps, *delta});
    }
  }
  return curve;
}

std::string FormatRiskCurve(const RiskCurve& curve) {
  std::string out = "alpha,epsilon,delta\n";
  for (const RiskPoint& p : curve.points) {
    absl::StrAppend(&out, ShortestDouble(p.alpha), ",",
                    ShortestDouble(p.epsilon), ",",
                    absl::StrFormat("%.17g", p.delta), "\n");
  }
  return out;
}

}  // namespace ctsynth
