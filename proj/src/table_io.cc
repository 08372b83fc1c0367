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

#include "ctsynth/table_io.h"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace ctsynth {
namespace {

bool NeedsQuoting(std::string_view field, char delimiter) {
  if (!field.empty() && field.front() == '#') return true;
  return field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
         std::string_view::npos;
}

}  // namespace

absl::StatusOr<std::vector<Row>> ParseDelimited(std::string_view text,
                                                char delimiter,
                                                bool skip_comments) {
  std::vector<Row> records;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool at_line_start = true;
  bool line_has_content = false;
  std::size_t line = 1;

  auto end_record = [&] {
    if (line_has_content) {
      current.push_back(std::move(field));
      records.push_back(std::move(current));
    }
    current.clear();
    field.clear();
    line_has_content = false;
    at_line_start = true;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (at_line_start && skip_comments && c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      ++line;
      continue;
    }
    at_line_start = false;
    if (c == '\n') {
      ++line;
      end_record();
    } else if (c == '\r') {
      // Dropped; CRLF line endings are accepted.
    } else if (c == delimiter) {
      line_has_content = true;
      current.push_back(std::move(field));
      field.clear();
    } else if (c == '"') {
      if (!field.empty()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d: unexpected quote inside field", line));
      }
      line_has_content = true;
      in_quotes = true;
    } else {
      line_has_content = true;
      field.push_back(c);
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError("unterminated quoted field");
  }
  end_record();
  return records;
}

std::string FormatDelimitedRow(const Row& fields, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    const std::string& f = fields[i];
    if (NeedsQuoting(f, delimiter)) {
      out.push_back('"');
      for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    } else {
      out += f;
    }
  }
  return out;
}

absl::StatusOr<Microdata> ParseMicrodata(std::string_view text,
                                         char delimiter) {
  auto records = ParseDelimited(text, delimiter);
  if (!records.ok()) return records.status();
  if (records->empty()) {
    return absl::InvalidArgumentError("microdata has no header row");
  }
  Microdata data;
  data.header = std::move(records->front());
  data.rows.assign(std::make_move_iterator(records->begin() + 1),
                   std::make_move_iterator(records->end()));
  return data;
}

absl::StatusOr<ContingencyTable> TabulateMicrodata(
    const Microdata& data, const std::optional<Schema>& schema, int threads) {
  if (!schema.has_value()) {
    auto inferred = InferSchema(data.header, data.rows);
    if (!inferred.ok()) return inferred.status();
    return Tabulate(data.rows, *inferred, threads);
  }
  const auto& vars = schema->variables();
  if (data.header.size() != vars.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("microdata has %d columns; schema has %d variables",
                        data.header.size(), vars.size()));
  }
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < data.header.size(); ++c) {
    if (!column_of.emplace(data.header[c], c).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate column '%s'", data.header[c]));
    }
  }
  std::vector<std::size_t> order(vars.size());
  bool identity = true;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto it = column_of.find(vars[j].name);
    if (it == column_of.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "schema variable '%s' missing from microdata header", vars[j].name));
    }
    order[j] = it->second;
    identity = identity && order[j] == j;
  }
  if (identity) return Tabulate(data.rows, *schema, threads);

  std::vector<Row> reordered;
  reordered.reserve(data.rows.size());
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const Row& row = data.rows[r];
    if (row.size() != order.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("row %d has %d fields; schema has %d variables", r,
                          row.size(), order.size()));
    }
    Row out(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = row[order[j]];
    reordered.push_back(std::move(out));
  }
  return Tabulate(reordered, *schema, threads);
}

std::string SchemaToJson(const Schema& schema) {
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (const Variable& v : schema.variables()) {
    vars.push_back({{"name", v.name}, {"categories", v.categories}});
  }
  nlohmann::ordered_json doc;
  doc["variables"] = std::move(vars);
  return doc.dump(2) + "\n";
}

absl::StatusOr<Schema> SchemaFromJson(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("schema descriptor is not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("variables") ||
      !doc["variables"].is_array()) {
    return absl::InvalidArgumentError(
        "schema descriptor needs a 'variables' array");
  }
  std::vector<Variable> vars;
  for (const auto& v : doc["variables"]) {
    if (!v.is_object() || !v.contains("name") || !v["name"].is_string() ||
        !v.contains("categories") || !v["categories"].is_array()) {
      return absl::InvalidArgumentError(
          "each variable needs a string 'name' and a 'categories' array");
    }
    Variable var{v["name"].get<std::string>(), {}};
    for (const auto& c : v["categories"]) {
      if (!c.is_string()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "variable '%s': category labels must be strings", var.name));
      }
      var.categories.push_back(c.get<std::string>());
    }
    vars.push_back(std::move(var));
  }
  return Schema::Create(std::move(vars));
}

std::string FormatTable(const ContingencyTable& table, char delimiter,
                        const std::vector<std::string>& comments) {
  std::string out;
  for (const std::string& c : comments) absl::StrAppend(&out, "# ", c, "\n");
  Row header;
  for (const Variable& v : table.schema().variables()) header.push_back(v.name);
  header.push_back("count");
  absl::StrAppend(&out, FormatDelimitedRow(header, delimiter), "\n");
  for (CellIndex cell = 0; cell < table.num_cells(); ++cell) {
    Row row = *table.schema().LabelsOf(cell);
    row.push_back(absl::StrCat(table.count(cell)));
    absl::StrAppend(&out, FormatDelimitedRow(row, delimiter), "\n");
  }
  return out;
}

absl::StatusOr<ContingencyTable> ParseTable(std::string_view text,
                                            const Schema& schema,
                                            char delimiter) {
  auto records = ParseDelimited(text, delimiter, /*skip_comments=*/true);
  if (!records.ok()) return records.status();
  if (records->empty()) {
    return absl::InvalidArgumentError("table file has no header row");
  }
  const std::size_t m = schema.num_variables();
  const Row& header = records->front();
  if (header.size() != m + 1 || header.back() != "count") {
    return absl::InvalidArgumentError(
        "table header must list the schema variables followed by 'count'");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (header[j] != schema.variables()[j].name) {
      return absl::InvalidArgumentError(
          absl::StrFormat("table column %d is '%s'; schema expects '%s'", j,
                          header[j], schema.variables()[j].name));
    }
  }
  std::vector<Count> counts(schema.num_cells(), 0);
  std::vector<bool> seen(schema.num_cells(), false);
  std::vector<std::size_t> idx(m);
  for (std::size_t r = 1; r < records->size(); ++r) {
    const Row& row = (*records)[r];
    if (row.size() != m + 1) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "table row %d has %d fields; expected %d", r, row.size(), m + 1));
    }
    for (std::size_t j = 0; j < m; ++j) {
      auto c = schema.CategoryIndex(j, row[j]);
      if (!c.ok()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("table row %d: %s", r, c.status().message()));
      }
      idx[j] = *c;
    }
    Count value = 0;
    if (!absl::SimpleAtoi(row[m], &value) || row[m].empty() ||
        row[m].front() == '-' || row[m].front() == '+') {
      return absl::InvalidArgumentError(absl::StrFormat(
          "table row %d: count '%s' is not a non-negative integer", r, row[m]));
    }
    const CellIndex cell = *schema.CellIndexOf(idx);
    if (seen[cell]) {
      return absl::InvalidArgumentError(
          absl::StrFormat("table row %d repeats cell %d", r, cell));
    }
    seen[cell] = true;
    counts[cell] = value;
  }
  if (records->size() - 1 != schema.num_cells()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("table lists %d cells; schema has %d",
                        records->size() - 1, schema.num_cells()));
  }
  return ContingencyTable::Create(schema, std::move(counts));
}

std::vector<std::string> ParseTableComments(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos + 1, end - pos - 1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    pos = end + 1;
  }
  return out;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open '%s': %s", path, std::strerror(errno)));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    return absl::UnavailableError(absl::StrFormat("error reading '%s'", path));
  }
  return std::move(buf).str();
}

absl::Status WriteFileAtomic(const std::string& path,
                             std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(absl::StrFormat(
          "cannot open '%s' for writing: %s", tmp, std::strerror(errno)));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      return absl::UnavailableError(absl::StrFormat("error writing '%s'", tmp));
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return absl::UnavailableError(absl::StrFormat(
        "cannot rename '%s' to '%s': %s", tmp, path, std::strerror(errno)));
  }
  return absl::OkStatus();
}

std::string SchemaSidecarPath(const std::string& table_path) {
  return table_path + ".schema.json";
}

}  // namespace ctsynth
