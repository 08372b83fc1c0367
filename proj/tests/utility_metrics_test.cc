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

#include <cmath>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "ctsynth/accounting.h"
#include "ctsynth/mechanisms.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace ctsynth {
namespace {

using ::testing::HasSubstr;

Schema Cells(std::size_t rows, std::size_t cols) {
  auto cats = [](std::size_t n) {
    std::vector<std::string> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(std::to_string(i));
    return c;
  };
  return *Schema::Create({{"R", cats(rows)}, {"C", cats(cols)}});
}

ContingencyTable Table(const Schema& s, std::vector<Count> c) {
  return *ContingencyTable::Create(s, std::move(c));
}

// E|b - c| / c * 100 for b ~ Poisson(c + alpha).
double AnalyticMeanAbsPercent(int c, double alpha) {
  const auto pmf = oracle::PoissonPmf(c + alpha, 400);
  long double sum = 0;
  for (int b = 0; b <= 400; ++b) sum += pmf[b] * std::fabs(b - c);
  return static_cast<double>(100.0L * sum / c);
}

TEST(QuantileTest, TypeSeven) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(Quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Quantile(x, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(Quantile(x, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile(x, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(Quantile(x, 1.0), 4.0);
  const std::vector<double> one = {7};
  EXPECT_DOUBLE_EQ(Quantile(one, 0.3), 7.0);
}

TEST(PercentageDifferencesTest, IdentityIsDegenerateAtZero) {
  const Schema s = Cells(3, 4);
  const auto t = Table(s, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 0, 3});
  const auto r = PercentageDifferences(t, std::span(&t, 1));
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->buckets.size(), 10u);
  for (const auto& b : r->buckets) {
    ASSERT_GT(b.size(), 0u);
    EXPECT_EQ(b.min, 0.0);
    EXPECT_EQ(b.max, 0.0);
    EXPECT_EQ(b.mean, 0.0);
  }
  EXPECT_EQ(r->buckets[2].size(), 2u);  // count 3 appears twice
}

TEST(PercentageDifferencesTest, SingleCellArithmeticAndEmptyBuckets) {
  const Schema s = *Schema::Create({{"X", {"a", "b"}}});
  const auto a = Table(s, {4, 0});
  const auto b = Table(s, {5, 3});
  const auto r = *PercentageDifferences(a, std::span(&b, 1));
  EXPECT_THAT(r.buckets[3].values, ::testing::ElementsAre(25.0));
  EXPECT_EQ(r.buckets[3].count, 4);
  EXPECT_EQ(r.buckets[0].size(), 0u);
  EXPECT_TRUE(std::isnan(r.buckets[0].median));
  const std::string text = FormatUtilityReport(r);
  EXPECT_THAT(text, HasSubstr("count,min,q1,median,q3,max,mean,n\n"));
  EXPECT_THAT(text, HasSubstr("\n1,NA,NA,NA,NA,NA,NA,0\n"));
  EXPECT_THAT(text, HasSubstr("\n4,25.000000,25.000000,25.000000,25.000000,"
                              "25.000000,25.000000,1\n"));
}

TEST(PercentageDifferencesTest, PoolsReplicatesAndCountsPopulation) {
  const Schema s = Cells(10, 20);
  std::vector<Count> c(s.num_cells());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = i % 14;
  const auto t = Table(s, c);
  std::vector<ContingencyTable> reps;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    reps.push_back(SynthPoisson(t, 0.5, seed)->table);
  }
  const auto r = *PercentageDifferences(t, reps, {2, 9});
  ASSERT_EQ(r.buckets.size(), 8u);
  std::size_t total = 0;
  for (const auto& b : r.buckets) total += b.size();
  std::size_t in_range = 0;
  for (Count x : c) in_range += (x >= 2 && x <= 9);
  EXPECT_EQ(total, 3 * in_range);
  for (const auto& b : r.buckets) {
    EXPECT_TRUE(std::is_sorted(b.values.begin(), b.values.end()));
    EXPECT_LE(b.min, b.q1);
    EXPECT_LE(b.q1, b.median);
    EXPECT_LE(b.median, b.q3);
    EXPECT_LE(b.q3, b.max);
  }
}

TEST(PercentageDifferencesTest, Errors) {
  const auto t = Table(Cells(2, 2), {1, 2, 3, 4});
  const auto other = Table(Cells(2, 3), {1, 2, 3, 4, 5, 6});
  EXPECT_FALSE(PercentageDifferences(t, std::span(&other, 1)).ok());
  EXPECT_FALSE(PercentageDifferences(t, std::span(&t, 1), {0, 10}).ok());
  EXPECT_FALSE(PercentageDifferences(t, std::span(&t, 1), {5, 4}).ok());
  EXPECT_FALSE(
      PercentageDifferences(t, std::span<const ContingencyTable>()).ok());
}

TEST(PercentageDifferencesTest, PoissonBucketOneMean) {
  const Schema s = Cells(100, 1000);
  const auto t = Table(s, std::vector<Count>(s.num_cells(), 1));
  const auto syn = *SynthPoisson(t, 1.0, 12);
  const auto r = *PercentageDifferences(t, syn);
  const auto& b = r.buckets[0];
  double var = 0;
  for (double v : b.values) var += (v - b.mean) * (v - b.mean);
  const double se = std::sqrt(var / (b.size() - 1) / b.size());
  EXPECT_NEAR(b.mean, 100.0, 4 * se);
}

TEST(PercentageDifferencesTest, MeanAbsNonDecreasingInAlpha) {
  const std::vector<double> alphas = {0.1, 0.2, 0.5, 1.0};
  const Schema s = Cells(100, 1000);
  for (int c = 1; c <= 10; ++c) {
    const auto t = Table(s, std::vector<Count>(s.num_cells(), c));
    std::vector<BucketSummary> buckets;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const auto syn = *SynthPoisson(t, alphas[j], 1000 + 10 * c + j);
      buckets.push_back(PercentageDifferences(t, syn, {c, c})->buckets[0]);
      EXPECT_NEAR(buckets.back().mean_abs, AnalyticMeanAbsPercent(c, alphas[j]),
                  4 * buckets.back().mean_abs_std_error)
          << c << " " << alphas[j];
    }
    for (std::size_t j = 1; j < alphas.size(); ++j) {
      const double gap = AnalyticMeanAbsPercent(c, alphas[j]) -
                         AnalyticMeanAbsPercent(c, alphas[j - 1]);
      ASSERT_GE(gap, 0.0);
      const double noise = std::hypot(buckets[j].mean_abs_std_error,
                                      buckets[j - 1].mean_abs_std_error);
      const double diff = buckets[j].mean_abs - buckets[j - 1].mean_abs;
      if (gap > 8 * noise) {
        EXPECT_GT(diff, 0.0) << c << " " << alphas[j];
      } else {
        EXPECT_GT(diff, -4 * noise) << c << " " << alphas[j];
      }
    }
  }
}

TEST(MeanAbsoluteDeviationTest, Examples) {
  const Schema s = *Schema::Create({{"X", {"a", "b"}}});
  const auto a = Table(s, {1, 2});
  EXPECT_EQ(*MeanAbsoluteDeviation(a, a), 0.0);
  EXPECT_EQ(*MeanAbsoluteDeviation(a, Table(s, {2, 4})), 1.5);
  EXPECT_FALSE(MeanAbsoluteDeviation(a, Table(Cells(2, 2), {0, 0, 0, 0})).ok());

  const Schema big = Cells(100, 1000);
  const auto zero = Table(big, std::vector<Count>(big.num_cells(), 0));
  const auto syn = *SynthPoisson(zero, 0.5, 3);
  const double mad = *MeanAbsoluteDeviation(zero, syn.table);
  EXPECT_NEAR(mad, 0.5, 4 * std::sqrt(0.5 / 1e5));
}

TEST(RiskCurveTest, Examples) {
  const std::vector<double> eps = {1.5, 2.0, 3.0};
  std::vector<double> alphas;
  for (int i = 1; i <= 10; ++i) alphas.push_back(i / 10.0);
  const auto curve = ComputeRiskCurve(eps, alphas);
  ASSERT_TRUE(curve.ok());
  ASSERT_EQ(curve->points.size(), 30u);
  for (const auto& p : curve->points) {
    EXPECT_EQ(p.delta, *PoissonDelta(p.epsilon, p.alpha));
    EXPECT_GE(p.delta, 0.0);
    EXPECT_LE(p.delta, 1.0);
  }
  EXPECT_EQ(curve->points[0].epsilon, 1.5);
  EXPECT_EQ(curve->points[1].alpha, 0.2);
  EXPECT_NEAR(curve->points[19].delta, 0.05265301734371116, 1e-12);  // (1, 2)
  EXPECT_NEAR(curve->points[20].delta, 0.30097072423403298, 1e-12);  // (0.1, 3)

  const std::vector<double> one_e = {2.0};
  const std::vector<double> one_a = {1.0};
  const auto single = *ComputeRiskCurve(one_e, one_a);
  ASSERT_EQ(single.points.size(), 1u);
  EXPECT_THAT(FormatRiskCurve(single),
              HasSubstr("alpha,epsilon,delta\n1,2,0.0526530173437"));

  const std::vector<double> low = {0.5};
  EXPECT_FALSE(ComputeRiskCurve(low, one_a).ok());
  const std::vector<double> zero_a = {0.0};
  EXPECT_FALSE(ComputeRiskCurve(one_e, zero_a).ok());
}

}  // namespace
}  // namespace ctsynth
