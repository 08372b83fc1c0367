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

#include "ctsynth/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "ctsynth/parallel.h"
#include "ctsynth/samplers.h"

namespace ctsynth {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool PositiveFinite(double x) { return std::isfinite(x) && x > 0.0; }

std::string Num(double x) { return ShortestDouble(x); }

// Applies `draw(a_i, rng)` to every cell with that cell's noise stream.
template <class Draw>
std::vector<Count> PerCell(const ContingencyTable& table, std::uint64_t seed,
                           int threads, const Draw& draw) {
  std::vector<Count> out(table.num_cells());
  ParallelFor(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = CounterRng::ForStream(seed, StreamPurpose::kCellNoise, i);
      out[i] = draw(table.count(i), rng);
    }
  });
  return out;
}

absl::StatusOr<SyntheticTable> Finish(const ContingencyTable& table,
                                      std::vector<Count> counts,
                                      MechanismSpec spec, std::uint64_t seed) {
  auto synthetic = ContingencyTable::Create(table.schema(), std::move(counts));
  if (!synthetic.ok()) return synthetic.status();
  return SyntheticTable{*std::move(synthetic), std::move(spec), seed};
}

}  // namespace

std::string ShortestDouble(double x) {
  for (int precision = 6; precision < 17; ++precision) {
    std::string s = absl::StrFormat("%.*g", precision, x);
    if (std::strtod(s.c_str(), nullptr) == x) return s;
  }
  return absl::StrFormat("%.17g", x);
}

absl::Status ValidateSpec(const MechanismSpec& spec,
                          std::optional<std::size_t> num_cells) {
  return std::visit(
      Overloaded{
          [](const PoissonSpec& s) -> absl::Status {
            if (!std::isfinite(s.alpha) || s.alpha < 0.0) {
              return absl::InvalidArgumentError(absl::StrFormat(
                  "poisson alpha must be finite and >= 0, got %g", s.alpha));
            }
            return absl::OkStatus();
          },
          [](const LaplaceSpec& s) -> absl::Status {
            if (!PositiveFinite(s.epsilon)) {
              return absl::InvalidArgumentError(absl::StrFormat(
                  "laplace epsilon must be finite and > 0, got %g", s.epsilon));
            }
            return absl::OkStatus();
          },
          [](const GaussianSpec& s) -> absl::Status {
            if (!PositiveFinite(s.sigma)) {
              return absl::InvalidArgumentError(absl::StrFormat(
                  "gaussian sigma must be finite and > 0, got %g", s.sigma));
            }
            return absl::OkStatus();
          },
          [&](const DirichletSpec& s) -> absl::Status {
            if (s.concentrations.empty()) {
              return absl::InvalidArgumentError(
                  "dirichlet needs a concentration vector");
            }
            for (std::size_t i = 0; i < s.concentrations.size(); ++i) {
              if (!PositiveFinite(s.concentrations[i])) {
                return absl::InvalidArgumentError(absl::StrFormat(
                    "dirichlet concentration %d must be finite and > 0, got %g",
                    i, s.concentrations[i]));
              }
            }
            if (num_cells.has_value() &&
                s.concentrations.size() != *num_cells) {
              return absl::InvalidArgumentError(absl::StrFormat(
                  "dirichlet has %d concentrations; table has %d cells",
                  s.concentrations.size(), *num_cells));
            }
            return absl::OkStatus();
          },
      },
      spec);
}

std::string MechanismName(const MechanismSpec& spec) {
  return std::visit(Overloaded{
                        [](const PoissonSpec&) { return "poisson"; },
                        [](const LaplaceSpec&) { return "laplace"; },
                        [](const GaussianSpec&) { return "gaussian"; },
                        [](const DirichletSpec&) { return "dirichlet"; },
                    },
                    spec);
}

std::string DescribeSpec(const MechanismSpec& spec) {
  return std::visit(
      Overloaded{
          [](const PoissonSpec& s) { return "poisson alpha=" + Num(s.alpha); },
          [](const LaplaceSpec& s) {
            return "laplace epsilon=" + Num(s.epsilon);
          },
          [](const GaussianSpec& s) {
            return "gaussian sigma=" + Num(s.sigma);
          },
          [](const DirichletSpec& s) {
            const auto& c = s.concentrations;
            if (std::all_of(c.begin(), c.end(),
                            [&](double x) { return x == c.front(); })) {
              return absl::StrFormat("dirichlet concentration=%s cells=%d",
                                     Num(c.front()), c.size());
            }
            return "dirichlet concentrations=" +
                   absl::StrJoin(c, ";", [](std::string* out, double x) {
                     out->append(Num(x));
                   });
          },
      },
      spec);
}

absl::StatusOr<SyntheticTable> SynthPoisson(const ContingencyTable& table,
                                            double alpha, std::uint64_t seed,
                                            int threads) {
  if (auto s = ValidateSpec(PoissonSpec{alpha}); !s.ok()) return s;
  if (alpha == 0.0) {
    for (CellIndex i = 0; i < table.num_cells(); ++i) {
      if (table.count(i) == 0) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "poisson alpha=0 requires every count >= 1, but cell %d is 0 "
            "(a zero-mean cell can never change); use alpha > 0",
            i));
      }
    }
  }
  auto counts =
      PerCell(table, seed, threads, [alpha](Count a, CounterRng& rng) {
        return SamplePoisson(static_cast<double>(a) + alpha, rng);
      });
  return Finish(table, std::move(counts), PoissonSpec{alpha}, seed);
}

absl::StatusOr<SyntheticTable> SynthLaplace(const ContingencyTable& table,
                                            double epsilon, std::uint64_t seed,
                                            int threads) {
  if (auto s = ValidateSpec(LaplaceSpec{epsilon}); !s.ok()) return s;
  const double scale = 1.0 / epsilon;
  auto counts =
      PerCell(table, seed, threads, [scale](Count a, CounterRng& rng) {
        return RoundAndClamp(static_cast<double>(a) +
                             SampleLaplace(scale, rng));
      });
  return Finish(table, std::move(counts), LaplaceSpec{epsilon}, seed);
}

absl::StatusOr<SyntheticTable> SynthGaussian(const ContingencyTable& table,
                                             double sigma, std::uint64_t seed,
                                             int threads) {
  if (auto s = ValidateSpec(GaussianSpec{sigma}); !s.ok()) return s;
  auto counts =
      PerCell(table, seed, threads, [sigma](Count a, CounterRng& rng) {
        return RoundAndClamp(static_cast<double>(a) +
                             sigma * SampleStandardNormal(rng));
      });
  return Finish(table, std::move(counts), GaussianSpec{sigma}, seed);
}

absl::StatusOr<SyntheticTable> SynthMultinomialDirichlet(
    const ContingencyTable& table, const std::vector<double>& concentrations,
    std::uint64_t seed, int threads) {
  DirichletSpec spec{concentrations};
  if (auto s = ValidateSpec(spec, table.num_cells()); !s.ok()) return s;
  const std::size_t k = table.num_cells();
  if (table.n() == 0) {
    return Finish(table, std::vector<Count>(k, 0), std::move(spec), seed);
  }

  // Dirichlet draw as normalized gammas, kept in log space.
  std::vector<double> log_gamma(k);
  ParallelFor(k, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = CounterRng::ForStream(seed, StreamPurpose::kDirichletGamma, i);
      log_gamma[i] = SampleLogGamma(
          static_cast<double>(table.count(i)) + concentrations[i], rng);
    }
  });
  const double peak = *std::max_element(log_gamma.begin(), log_gamma.end());
  std::vector<double> weight(k);
  for (std::size_t i = 0; i < k; ++i) weight[i] = std::exp(log_gamma[i] - peak);
  // suffix[i] = sum of weight[i..k). Conditional probabilities use the exact
  // remaining mass instead of 1 - (running sum), which cancels badly.
  std::vector<double> suffix(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + weight[i];

  // Multinomial by sequential conditional binomials.
  std::vector<Count> counts(k, 0);
  Count remaining = table.n();
  for (std::size_t i = 0; i + 1 < k && remaining > 0; ++i) {
    auto rng = CounterRng::ForStream(seed, StreamPurpose::kMultinomialSplit, i);
    const double p = suffix[i] > 0.0 ? weight[i] / suffix[i] : 0.0;
    counts[i] = SampleBinomial(remaining, p, rng);
    remaining -= counts[i];
  }
  counts[k - 1] += remaining;
  return Finish(table, std::move(counts), std::move(spec), seed);
}

absl::StatusOr<SyntheticTable> Synthesize(const ContingencyTable& table,
                                          const MechanismSpec& spec,
                                          std::uint64_t seed, int threads) {
  return std::visit(Overloaded{
                        [&](const PoissonSpec& s) {
                          return SynthPoisson(table, s.alpha, seed, threads);
                        },
                        [&](const LaplaceSpec& s) {
                          return SynthLaplace(table, s.epsilon, seed, threads);
                        },
                        [&](const GaussianSpec& s) {
                          return SynthGaussian(table, s.sigma, seed, threads);
                        },
                        [&](const DirichletSpec& s) {
                          return SynthMultinomialDirichlet(
                              table, s.concentrations, seed, threads);
                        },
                    },
                    spec);
}

}  // namespace ctsynth
