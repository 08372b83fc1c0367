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

#include "ctsynth/audit.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ctsynth/accounting.h"
#include "ctsynth/parallel.h"
#include "ctsynth/rng.h"
#include "ctsynth/samplers.h"

namespace ctsynth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// log P(Y in [lo, hi)) for Y ~ Laplace(0, 1/eps). lo may be -inf.
double LogLaplaceInterval(double lo, double hi, double eps) {
  const double log_half = -std::numbers::ln2;
  if (lo == -kInf) {
    return hi < 0.0 ? log_half + eps * hi
                    : std::log1p(-0.5 * std::exp(-eps * hi));
  }
  const double width_term = std::log(-std::expm1(-eps * (hi - lo)));
  if (lo >= 0.0) return log_half - eps * lo + width_term;
  if (hi <= 0.0) return log_half + eps * hi + width_term;
  return std::log1p(-0.5 * std::exp(eps * lo) - 0.5 * std::exp(-eps * hi));
}

// log P(Z in [lo, hi)) for standard normal Z. lo may be -inf.
double LogNormalInterval(double lo, double hi) {
  const double r = std::numbers::sqrt2;
  double p;
  if (lo == -kInf) {
    p = 0.5 * std::erfc(-hi / r);
  } else if (lo >= 0.0) {
    p = 0.5 * (std::erfc(lo / r) - std::erfc(hi / r));
  } else if (hi <= 0.0) {
    p = 0.5 * (std::erfc(-hi / r) - std::erfc(-lo / r));
  } else {
    p = 1.0 - 0.5 * std::erfc(hi / r) - 0.5 * std::erfc(-lo / r);
  }
  return p > 0.0 ? std::log(p) : -kInf;
}

// Released value b = max(0, round(mean + noise)) takes value b when the
// pre-rounding value lies in [b - 1/2, b + 1/2), or below 1/2 for b = 0.
template <class LogInterval>
double LogReleasedProb(std::uint64_t b, double mean,
                       const LogInterval& log_interval) {
  if (b == 0) return log_interval(-kInf, 0.5 - mean);
  const double bd = static_cast<double>(b);
  return log_interval(bd - 0.5 - mean, bd + 0.5 - mean);
}

bool WithinBounds(double log_ratio, double epsilon) {
  return log_ratio >= -epsilon && log_ratio <= epsilon;
}

double DirichletRestConcentration(const DirichletSpec& s) {
  return std::accumulate(s.concentrations.begin() + 1, s.concentrations.end(),
                         0.0);
}

absl::Status CheckDirichletAudit(const DirichletSpec& s, std::int64_t total,
                                 std::int64_t a_k) {
  if (s.concentrations.size() < 2) {
    return absl::InvalidArgumentError(
        "dirichlet audit needs concentrations for cell k and the rest of the "
        "table (at least 2 values)");
  }
  if (total < a_k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dirichlet audit needs a table total n >= a_k (n = %d, a_k = %d)",
        total, a_k));
  }
  return absl::OkStatus();
}

// P(b_k <= floor(limit)) for b_k ~ BetaBinomial(n, a, b).
double BetaBinomialCdf(std::int64_t n, double a, double b, double limit) {
  if (limit < 0.0) return 0.0;
  if (limit >= static_cast<double>(n)) return 1.0;
  const std::int64_t top = static_cast<std::int64_t>(std::floor(limit));
  const double nd = static_cast<double>(n);
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) -
                          std::lgamma(nd + a + b) + std::lgamma(nd + 1.0);
  double sum = 0.0;
  for (std::int64_t k = 0; k <= top; ++k) {
    const double kd = static_cast<double>(k);
    sum += std::exp(log_norm + std::lgamma(kd + a) + std::lgamma(nd - kd + b) -
                    std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0));
  }
  return std::min(sum, 1.0);
}

using TrialFn = std::function<bool(CounterRng&)>;

absl::StatusOr<TrialFn> MakeTrial(const AuditConfig& config, std::int64_t a_k) {
  const double eps = config.epsilon;
  const bool post = config.post_rounding;
  const double a = static_cast<double>(a_k);
  return std::visit(
      Overloaded{
          [&](const PoissonSpec& s) -> absl::StatusOr<TrialFn> {
            if (post) {
              return absl::InvalidArgumentError(
                  "post-rounding audits apply to laplace and gaussian only");
            }
            const double alpha = s.alpha;
            return TrialFn([=](CounterRng& rng) {
              const auto b =
                  static_cast<std::int64_t>(SamplePoisson(a + alpha, rng));
              return WithinBounds(*PoissonLogRatio(a_k, b, alpha), eps);
            });
          },
          [&](const LaplaceSpec& s) -> absl::StatusOr<TrialFn> {
            const double mech_eps = s.epsilon;
            const double scale = 1.0 / mech_eps;
            if (!post) {
              return TrialFn([=](CounterRng& rng) {
                const double x = a + SampleLaplace(scale, rng);
                return WithinBounds(LaplaceLogDensityRatio(a, x, mech_eps),
                                    eps);
              });
            }
            return TrialFn([=](CounterRng& rng) {
              const std::uint64_t b =
                  RoundAndClamp(a + SampleLaplace(scale, rng));
              auto log_interval = [mech_eps](double lo, double hi) {
                return LogLaplaceInterval(lo, hi, mech_eps);
              };
              const double lr = LogReleasedProb(b, a, log_interval) -
                                LogReleasedProb(b, a - 1.0, log_interval);
              return WithinBounds(lr, eps);
            });
          },
          [&](const GaussianSpec& s) -> absl::StatusOr<TrialFn> {
            const double sigma = s.sigma;
            if (!post) {
              return TrialFn([=](CounterRng& rng) {
                const double x = a + sigma * SampleStandardNormal(rng);
                return WithinBounds(GaussianLogRatio(a, x, sigma), eps);
              });
            }
            return TrialFn([=](CounterRng& rng) {
              const std::uint64_t b =
                  RoundAndClamp(a + sigma * SampleStandardNormal(rng));
              auto log_interval = [sigma](double lo, double hi) {
                return LogNormalInterval(lo / sigma, hi / sigma);
              };
              const double lr = LogReleasedProb(b, a, log_interval) -
                                LogReleasedProb(b, a - 1.0, log_interval);
              // NaN (both probabilities underflowed) counts as a failure.
              return WithinBounds(lr, eps);
            });
          },
          [&](const DirichletSpec& s) -> absl::StatusOr<TrialFn> {
            if (post) {
              return absl::InvalidArgumentError(
                  "post-rounding audits apply to laplace and gaussian only");
            }
            const std::int64_t n = config.dirichlet_total;
            if (auto st = CheckDirichletAudit(s, n, a_k); !st.ok()) return st;
            const double alpha_k = s.concentrations.front();
            const double shape_k = a + alpha_k;
            const double shape_rest =
                static_cast<double>(n - a_k) + DirichletRestConcentration(s);
            return TrialFn([=](CounterRng& rng) {
              const double p = SampleBeta(shape_k, shape_rest, rng);
              const auto b = static_cast<std::int64_t>(
                  SampleBinomial(static_cast<std::uint64_t>(n), p, rng));
              return std::log(*DirichletRatio(a_k, b, alpha_k)) <= eps;
            });
          },
      },
      config.mechanism);
}

}  // namespace

absl::StatusOr<PassRate> MonteCarloPassRate(const AuditConfig& config,
                                            std::int64_t a_k) {
  if (auto s = ValidateSpec(config.mechanism); !s.ok()) return s;
  if (!std::isfinite(config.epsilon) || config.epsilon <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "epsilon must be finite and > 0, got %g", config.epsilon));
  }
  if (config.trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("trials must be >= 1, got %d", config.trials));
  }
  if (a_k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_k must be >= 1, got %d", a_k));
  }
  auto trial = MakeTrial(config, a_k);
  if (!trial.ok()) return trial.status();

  const std::uint64_t key =
      Mix64(config.seed) ^ Mix64(static_cast<std::uint64_t>(a_k) + 1);
  const auto trials = static_cast<std::size_t>(config.trials);
  const int threads =
      config.threads <= 0 ? DefaultThreadCount() : config.threads;
  const std::size_t chunks = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(threads), trials));
  std::vector<std::uint64_t> passes(chunks, 0);
  const std::size_t step = (trials + chunks - 1) / chunks;
  ParallelFor(chunks, threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t c = first; c < last; ++c) {
      const std::size_t begin = c * step;
      const std::size_t end = std::min(trials, begin + step);
      std::uint64_t ok = 0;
      for (std::size_t t = begin; t < end; ++t) {
        auto rng = CounterRng::ForStream(key, StreamPurpose::kAuditTrial, t);
        ok += (*trial)(rng) ? 1 : 0;
      }
      passes[c] = ok;
    }
  });
  const double total = static_cast<double>(
      std::accumulate(passes.begin(), passes.end(), std::uint64_t{0}));
  const double n = static_cast<double>(trials);
  const double rate = total / n;
  return PassRate{rate, std::sqrt(rate * (1.0 - rate) / n)};
}

absl::StatusOr<double> ExactPassRatePoisson(std::int64_t a_k, double alpha,
                                            double epsilon) {
  auto t = PoissonRatioThresholds(a_k, alpha, epsilon);
  if (!t.ok()) return t.status();
  const double mean = static_cast<double>(a_k) + alpha;
  const double hi = std::floor(t->upper);
  if (epsilon >= 1.0) {
    // Lower bound holds for every b_k >= 0.
    return 1.0 - *PoissonSurvival(hi, mean);
  }
  const double lo = std::max(0.0, std::ceil(t->lower));
  if (hi < lo) return 0.0;
  // P(lo <= X <= hi), from whichever tail avoids cancellation.
  if (lo - 1.0 >= mean) {
    return std::max(
        0.0, *PoissonSurvival(lo - 1.0, mean) - *PoissonSurvival(hi, mean));
  }
  return std::max(0.0, *PoissonCdf(hi, mean) - *PoissonCdf(lo - 1.0, mean));
}

absl::StatusOr<std::optional<double>> AnalyticPassRate(
    const AuditConfig& config, std::int64_t a_k) {
  if (config.post_rounding) return std::optional<double>();
  const double eps = config.epsilon;
  return std::visit(
      Overloaded{
          [&](const PoissonSpec& s) -> absl::StatusOr<std::optional<double>> {
            if (a_k == 1 && s.alpha == 0.0) {
              // Reduced cell has mean 0: only b_k = 0 has a finite ratio,
              // exp(-1), which is inside the bounds iff epsilon >= 1.
              if (eps < 1.0) return std::optional<double>(0.0);
              return std::optional<double>(std::exp(-1.0));
            }
            auto r = ExactPassRatePoisson(a_k, s.alpha, eps);
            if (!r.ok()) return r.status();
            return std::optional<double>(*r);
          },
          [&](const LaplaceSpec& s) -> absl::StatusOr<std::optional<double>> {
            // With y = b - a_k the log ratio is eps_m * (|y + 1| - |y|):
            // +-eps_m outside (-1, 0) and linear inside it.
            if (eps >= s.epsilon) return std::optional<double>(1.0);
            const double c = eps / s.epsilon;
            const double p = 0.5 * (std::exp(-s.epsilon * (1.0 - c) / 2.0) -
                                    std::exp(-s.epsilon * (1.0 + c) / 2.0));
            return std::optional<double>(p);
          },
          [&](const GaussianSpec& s) -> absl::StatusOr<std::optional<double>> {
            auto delta = GaussianDelta(eps, s.sigma);
            if (!delta.ok()) return delta.status();
            return std::optional<double>(1.0 - *delta);
          },
          [&](const DirichletSpec& s) -> absl::StatusOr<std::optional<double>> {
            const std::int64_t n = config.dirichlet_total;
            if (auto st = CheckDirichletAudit(s, n, a_k); !st.ok()) return st;
            const double alpha_k = s.concentrations.front();
            const double base = static_cast<double>(a_k - 1) + alpha_k;
            const double shape_rest =
                static_cast<double>(n - a_k) + DirichletRestConcentration(s);
            return std::optional<double>(
                BetaBinomialCdf(n, static_cast<double>(a_k) + alpha_k,
                                shape_rest, std::expm1(eps) * base));
          },
      },
      config.mechanism);
}

absl::StatusOr<WorstCase> WorstCaseScan(double alpha, double epsilon,
                                        std::int64_t a_max) {
  if (a_max < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("a_max must be >= 1, got %d", a_max));
  }
  WorstCase worst{0, kInf};
  for (std::int64_t a = 1; a <= a_max; ++a) {
    auto rate = ExactPassRatePoisson(a, alpha, epsilon);
    if (!rate.ok()) return rate.status();
    if (*rate < worst.pass_rate) worst = {a, *rate};
  }
  return worst;
}

absl::StatusOr<AuditReport> RunAudit(const AuditConfig& config) {
  if (config.a_values.empty()) {
    return absl::InvalidArgumentError("audit needs at least one a_k value");
  }
  AuditReport report{DescribeSpec(config.mechanism),
                     config.epsilon,
                     config.trials,
                     config.seed,
                     config.post_rounding,
                     {},
                     0};
  double worst_rate = kInf;
  for (std::int64_t a_k : config.a_values) {
    auto mc = MonteCarloPassRate(config, a_k);
    if (!mc.ok()) return mc.status();
    auto analytic = AnalyticPassRate(config, a_k);
    if (!analytic.ok()) return analytic.status();
    AuditRow row{a_k, mc->rate, *analytic, mc->std_error, std::nullopt};
    if (analytic->has_value()) {
      const double p = **analytic;
      const double null_se = std::sqrt(std::max(0.0, p * (1.0 - p)) /
                                       static_cast<double>(config.trials));
      const double band = kAuditBandSigmas * std::max(mc->std_error, null_se);
      row.passed = std::fabs(mc->rate - p) <= band;
    }
    if (mc->rate < worst_rate ||
        (mc->rate == worst_rate && a_k < report.worst_case_a)) {
      worst_rate = mc->rate;
      report.worst_case_a = a_k;
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string FormatAuditReport(const AuditReport& report) {
  std::string out;
  absl::StrAppend(&out, "# mechanism: ", report.mechanism, "\n");
  absl::StrAppendFormat(&out, "# epsilon: %.17g\n", report.epsilon);
  absl::StrAppend(&out, "# trials: ", report.trials, "\n");
  absl::StrAppend(&out, "# seed: ", report.seed, "\n");
  absl::StrAppend(
      &out, "# ratio: ",
      report.post_rounding ? "post-rounding (empirical only)" : "pre-rounding",
      "\n");
  absl::StrAppend(&out, "# worst_case_a: ", report.worst_case_a, "\n");
  out += "a_k,empirical,analytic,std_error,pass\n";
  for (const AuditRow& r : report.rows) {
    absl::StrAppendFormat(
        &out, "%d,%.10f,%s,%.10f,%s\n", r.a_k, r.empirical,
        r.analytic ? absl::StrFormat("%.10f", *r.analytic) : std::string("NA"),
        r.std_error, r.passed ? (*r.passed ? "pass" : "fail") : "NA");
  }
  return out;
}

}  // namespace ctsynth
