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

// Categorical schema and full cross-classified contingency tables.
//
// Cells are laid out row-major: the last variable varies fastest, so for
// category indices (i_0, ..., i_{m-1}) the cell index is
//   sum_j i_j * prod_{l > j} |categories_l|.

#ifndef CTSYNTH_TABLE_H_
#define CTSYNTH_TABLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace ctsynth {

using Count = std::uint64_t;
using CellIndex = std::size_t;

// Upper bound on table size accepted by Schema::Create.
inline constexpr std::size_t kMaxCells = 100'000'000;

struct Variable {
  std::string name;
  std::vector<std::string> categories;

  bool operator==(const Variable&) const = default;
};

class Schema {
 public:
  // Requires at least one variable, at least two distinct categories per
  // variable, unique variable names, and a cell count within kMaxCells.
  static absl::StatusOr<Schema> Create(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_cells() const { return num_cells_; }

  // Position of `label` among the categories of variable `var`.
  absl::StatusOr<std::size_t> CategoryIndex(std::size_t var,
                                            std::string_view label) const;

  absl::StatusOr<CellIndex> CellIndexOf(
      std::span<const std::size_t> category_indices) const;
  absl::StatusOr<std::vector<std::size_t>> CategoryIndicesOf(
      CellIndex cell) const;

  // Category labels of a cell, one per variable.
  absl::StatusOr<std::vector<std::string>> LabelsOf(CellIndex cell) const;

  bool operator==(const Schema& other) const {
    return variables_ == other.variables_;
  }

 private:
  explicit Schema(std::vector<Variable> variables);

  std::vector<Variable> variables_;
  std::vector<std::size_t> strides_;
  std::vector<std::unordered_map<std::string, std::size_t>> lookup_;
  std::size_t num_cells_ = 0;
};

// Immutable table of non-negative counts over every cell of a schema,
// zero cells included.
class ContingencyTable {
 public:
  static absl::StatusOr<ContingencyTable> Create(Schema schema,
                                                 std::vector<Count> counts);
  static ContingencyTable Zeros(Schema schema);

  const Schema& schema() const { return schema_; }
  std::span<const Count> counts() const { return counts_; }
  Count count(CellIndex cell) const { return counts_[cell]; }
  std::size_t num_cells() const { return counts_.size(); }
  // Total number of individuals.
  Count n() const { return n_; }

  bool operator==(const ContingencyTable& other) const {
    return counts_ == other.counts_ && schema_ == other.schema_;
  }

 private:
  ContingencyTable(Schema schema, std::vector<Count> counts, Count n)
      : schema_(std::move(schema)), counts_(std::move(counts)), n_(n) {}

  Schema schema_;
  std::vector<Count> counts_;
  Count n_;
};

// Two tables differing by one individual in cell k:
// reduced.count(k) == full.count(k) - 1, all other cells equal.
struct NeighborPair {
  ContingencyTable full;
  ContingencyTable reduced;
  CellIndex k;
};

using Row = std::vector<std::string>;

// Counts each row into its cell. Row i is checked for arity and for labels
// known to the schema; errors name the offending row, variable and label.
// Rows are split into `threads` partitions whose partial counts are summed,
// so the result does not depend on the thread count.
absl::StatusOr<ContingencyTable> Tabulate(std::span<const Row> rows,
                                          const Schema& schema,
                                          int threads = 1);

// One row per individual, in ascending cell order.
std::vector<Row> Expand(const ContingencyTable& table);

// Removes one individual from cell k.
absl::StatusOr<ContingencyTable> Neighbor(const ContingencyTable& table,
                                          CellIndex k);
absl::StatusOr<NeighborPair> MakeNeighborPair(const ContingencyTable& table,
                                              CellIndex k);

// Schema whose categories are the distinct labels observed in each column,
// sorted lexicographically.
absl::StatusOr<Schema> InferSchema(std::span<const std::string> names,
                                   std::span<const Row> rows);

}  // namespace ctsynth

#endif  // CTSYNTH_TABLE_H_
