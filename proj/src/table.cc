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

#include "ctsynth/table.h"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ctsynth/parallel.h"

namespace ctsynth {

Schema::Schema(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  const std::size_t m = variables_.size();
  strides_.assign(m, 1);
  for (std::size_t j = m; j-- > 1;) {
    strides_[j - 1] = strides_[j] * variables_[j].categories.size();
  }
  num_cells_ = strides_[0] * variables_[0].categories.size();
  lookup_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& cats = variables_[j].categories;
    for (std::size_t c = 0; c < cats.size(); ++c)
      lookup_[j].emplace(cats[c], c);
  }
}

absl::StatusOr<Schema> Schema::Create(std::vector<Variable> variables) {
  if (variables.empty()) {
    return absl::InvalidArgumentError("schema needs at least one variable");
  }
  std::unordered_set<std::string> names;
  std::size_t cells = 1;
  for (const Variable& v : variables) {
    if (v.name.empty()) {
      return absl::InvalidArgumentError("variable names must be non-empty");
    }
    if (!names.insert(v.name).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate variable name '%s'", v.name));
    }
    if (v.categories.size() < 2) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "variable '%s' has %d categories; at least 2 are required", v.name,
          v.categories.size()));
    }
    std::unordered_set<std::string> labels;
    for (const std::string& label : v.categories) {
      if (!labels.insert(label).second) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "variable '%s' lists category '%s' twice", v.name, label));
      }
    }
    if (cells > kMaxCells / v.categories.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("schema exceeds %d cells", kMaxCells));
    }
    cells *= v.categories.size();
  }
  return Schema(std::move(variables));
}

absl::StatusOr<std::size_t> Schema::CategoryIndex(
    std::size_t var, std::string_view label) const {
  if (var >= variables_.size()) {
    return absl::OutOfRangeError(absl::StrFormat("no variable %d", var));
  }
  auto it = lookup_[var].find(std::string(label));
  if (it == lookup_[var].end()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown label '%s' for variable '%s'",
                        std::string(label), variables_[var].name));
  }
  return it->second;
}

absl::StatusOr<CellIndex> Schema::CellIndexOf(
    std::span<const std::size_t> category_indices) const {
  if (category_indices.size() != variables_.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("expected %d category indices, got %d",
                        variables_.size(), category_indices.size()));
  }
  CellIndex cell = 0;
  for (std::size_t j = 0; j < category_indices.size(); ++j) {
    if (category_indices[j] >= variables_[j].categories.size()) {
      return absl::OutOfRangeError(
          absl::StrFormat("category index %d out of range for variable '%s'",
                          category_indices[j], variables_[j].name));
    }
    cell += category_indices[j] * strides_[j];
  }
  return cell;
}

absl::StatusOr<std::vector<std::size_t>> Schema::CategoryIndicesOf(
    CellIndex cell) const {
  if (cell >= num_cells_) {
    return absl::OutOfRangeError(
        absl::StrFormat("cell %d out of range [0, %d)", cell, num_cells_));
  }
  std::vector<std::size_t> out(variables_.size());
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    out[j] = cell / strides_[j];
    cell %= strides_[j];
  }
  return out;
}

absl::StatusOr<std::vector<std::string>> Schema::LabelsOf(
    CellIndex cell) const {
  auto indices = CategoryIndicesOf(cell);
  if (!indices.ok()) return indices.status();
  std::vector<std::string> labels;
  labels.reserve(indices->size());
  for (std::size_t j = 0; j < indices->size(); ++j) {
    labels.push_back(variables_[j].categories[(*indices)[j]]);
  }
  return labels;
}

absl::StatusOr<ContingencyTable> ContingencyTable::Create(
    Schema schema, std::vector<Count> counts) {
  if (counts.size() != schema.num_cells()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("schema has %d cells but %d counts were given",
                        schema.num_cells(), counts.size()));
  }
  Count n = 0;
  for (Count c : counts) {
    if (c > std::numeric_limits<Count>::max() - n) {
      return absl::InvalidArgumentError("total count overflows 64 bits");
    }
    n += c;
  }
  return ContingencyTable(std::move(schema), std::move(counts), n);
}

ContingencyTable ContingencyTable::Zeros(Schema schema) {
  std::vector<Count> counts(schema.num_cells(), 0);
  return ContingencyTable(std::move(schema), std::move(counts), 0);
}

absl::StatusOr<ContingencyTable> Tabulate(std::span<const Row> rows,
                                          const Schema& schema, int threads) {
  const std::size_t m = schema.num_variables();
  if (threads <= 0) threads = DefaultThreadCount();
  const std::size_t parts = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(threads), rows.size()));
  const std::size_t step = rows.empty() ? 1 : (rows.size() + parts - 1) / parts;

  std::vector<std::vector<Count>> partial(
      parts, std::vector<Count>(schema.num_cells(), 0));
  // First failing row per partition, so the reported row is the earliest.
  std::vector<std::pair<std::size_t, absl::Status>> failures(
      parts, {rows.size(), absl::OkStatus()});

  ParallelFor(parts, threads, [&](std::size_t first, std::size_t last) {
    std::vector<std::size_t> idx(m);
    for (std::size_t part = first; part < last; ++part) {
      const std::size_t begin = part * step;
      const std::size_t end = std::min(rows.size(), begin + step);
      for (std::size_t r = begin; r < end; ++r) {
        const Row& row = rows[r];
        if (row.size() != m) {
          failures[part] = {r, absl::InvalidArgumentError(absl::StrFormat(
                                   "row %d has %d fields; schema has %d "
                                   "variables",
                                   r, row.size(), m))};
          return;
        }
        for (std::size_t j = 0; j < m; ++j) {
          auto c = schema.CategoryIndex(j, row[j]);
          if (!c.ok()) {
            failures[part] = {
                r, absl::InvalidArgumentError(absl::StrFormat(
                       "row %d, variable '%s': unknown label '%s'", r,
                       schema.variables()[j].name, row[j]))};
            return;
          }
          idx[j] = *c;
        }
        ++partial[part][*schema.CellIndexOf(idx)];
      }
    }
  });

  for (const auto& [row, status] : failures) {
    if (!status.ok()) return status;
  }
  std::vector<Count> counts(schema.num_cells(), 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += p[i];
  }
  return ContingencyTable::Create(schema, std::move(counts));
}

std::vector<Row> Expand(const ContingencyTable& table) {
  std::vector<Row> rows;
  rows.reserve(table.n());
  for (CellIndex cell = 0; cell < table.num_cells(); ++cell) {
    const Count c = table.count(cell);
    if (c == 0) continue;
    Row labels = *table.schema().LabelsOf(cell);
    for (Count i = 0; i < c; ++i) rows.push_back(labels);
  }
  return rows;
}

absl::StatusOr<ContingencyTable> Neighbor(const ContingencyTable& table,
                                          CellIndex k) {
  if (k >= table.num_cells()) {
    return absl::OutOfRangeError(
        absl::StrFormat("cell %d out of range [0, %d)", k, table.num_cells()));
  }
  if (table.count(k) == 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cell %d has count 0: no individual to remove", k));
  }
  std::vector<Count> counts(table.counts().begin(), table.counts().end());
  --counts[k];
  return ContingencyTable::Create(table.schema(), std::move(counts));
}

absl::StatusOr<NeighborPair> MakeNeighborPair(const ContingencyTable& table,
                                              CellIndex k) {
  auto reduced = Neighbor(table, k);
  if (!reduced.ok()) return reduced.status();
  return NeighborPair{table, *std::move(reduced), k};
}

absl::StatusOr<Schema> InferSchema(std::span<const std::string> names,
                                   std::span<const Row> rows) {
  std::vector<std::set<std::string>> seen(names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != names.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("row %d has %d fields; header has %d", r,
                          rows[r].size(), names.size()));
    }
    for (std::size_t j = 0; j < names.size(); ++j) seen[j].insert(rows[r][j]);
  }
  std::vector<Variable> vars;
  vars.reserve(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    vars.push_back({names[j], {seen[j].begin(), seen[j].end()}});
  }
  return Schema::Create(std::move(vars));
}

}  // namespace ctsynth
