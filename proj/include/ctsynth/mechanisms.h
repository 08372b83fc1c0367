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

// Count-noise synthesis mechanisms.
//
// Every mechanism is a deterministic function of (table, spec, seed). Each
// cell draws from its own counter-based stream keyed by (seed, cell), so
// results are identical for any thread count.

#ifndef CTSYNTH_MECHANISMS_H_
#define CTSYNTH_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ctsynth/rng.h"
#include "ctsynth/table.h"

namespace ctsynth {

// b_i ~ Poisson(a_i + alpha). alpha == 0 is only valid when no cell is zero.
struct PoissonSpec {
  double alpha = 1.0;
};

// b_i = max(0, round(a_i + L)), L ~ Laplace(0, 1 / epsilon).
struct LaplaceSpec {
  double epsilon = 1.0;
};

// b_i = max(0, round(a_i + G)), G ~ Normal(0, sigma^2).
struct GaussianSpec {
  double sigma = 1.0;
};

// pi ~ Dirichlet(a + concentrations), b ~ Multinomial(n, pi).
struct DirichletSpec {
  std::vector<double> concentrations;
};

using MechanismSpec =
    std::variant<PoissonSpec, LaplaceSpec, GaussianSpec, DirichletSpec>;

// Parameter ranges; with `num_cells` also the Dirichlet vector length.
absl::Status ValidateSpec(const MechanismSpec& spec,
                          std::optional<std::size_t> num_cells = std::nullopt);

// "poisson", "laplace", "gaussian" or "dirichlet".
std::string MechanismName(const MechanismSpec& spec);
// Shortest %g rendering that parses back to exactly x.
std::string ShortestDouble(double x);

// Name and parameters, e.g. "poisson alpha=0.5". Doubles print with
// round-trip precision.
std::string DescribeSpec(const MechanismSpec& spec);

struct SyntheticTable {
  ContingencyTable table;
  MechanismSpec spec;
  std::uint64_t seed;
};

absl::StatusOr<SyntheticTable> SynthPoisson(const ContingencyTable& table,
                                            double alpha, std::uint64_t seed,
                                            int threads = 1);
absl::StatusOr<SyntheticTable> SynthLaplace(const ContingencyTable& table,
                                            double epsilon, std::uint64_t seed,
                                            int threads = 1);
absl::StatusOr<SyntheticTable> SynthGaussian(const ContingencyTable& table,
                                             double sigma, std::uint64_t seed,
                                             int threads = 1);
// Synthetic total equals table.n().
absl::StatusOr<SyntheticTable> SynthMultinomialDirichlet(
    const ContingencyTable& table, const std::vector<double>& concentrations,
    std::uint64_t seed, int threads = 1);

absl::StatusOr<SyntheticTable> Synthesize(const ContingencyTable& table,
                                          const MechanismSpec& spec,
                                          std::uint64_t seed, int threads = 1);

}  // namespace ctsynth

#endif  // CTSYNTH_MECHANISMS_H_
