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

// Text formats for microdata, tables and schema descriptors.
//
// Microdata: delimited text, header row of variable names, one individual
// per row. Fields may be double-quoted; "" inside quotes is a literal quote.
//
// Table file: optional '#' comment lines (provenance), a header row of
// variable names followed by "count", then one row per cell in ascending
// cell order, including zero cells.
//
// Schema descriptor (JSON):
//   {"variables": [{"name": "sex", "categories": ["F", "M"]}, ...]}
//
// Read errors on the filesystem are reported as NotFound / Unavailable;
// malformed content as InvalidArgument.

#ifndef CTSYNTH_TABLE_IO_H_
#define CTSYNTH_TABLE_IO_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ctsynth/table.h"

namespace ctsynth {

struct Microdata {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

// Splits text into records and fields. Blank lines are skipped; a trailing
// '\r' is stripped from every line. When `skip_comments` is set, lines that
// start with '#' outside quotes are skipped.
absl::StatusOr<std::vector<Row>> ParseDelimited(std::string_view text,
                                                char delimiter,
                                                bool skip_comments = false);

std::string FormatDelimitedRow(const Row& fields, char delimiter);

absl::StatusOr<Microdata> ParseMicrodata(std::string_view text, char delimiter);

// Tabulates microdata against a schema. Columns are matched to schema
// variables by header name, in any order. With no schema one is inferred.
absl::StatusOr<ContingencyTable> TabulateMicrodata(
    const Microdata& data, const std::optional<Schema>& schema,
    int threads = 1);

std::string SchemaToJson(const Schema& schema);
absl::StatusOr<Schema> SchemaFromJson(std::string_view text);

// `comments` are emitted first, each prefixed by "# ".
std::string FormatTable(const ContingencyTable& table, char delimiter,
                        const std::vector<std::string>& comments = {});
absl::StatusOr<ContingencyTable> ParseTable(std::string_view text,
                                            const Schema& schema,
                                            char delimiter);

// Comment lines ("# " stripped) preceding the header of a table file.
std::vector<std::string> ParseTableComments(std::string_view text);

absl::StatusOr<std::string> ReadFile(const std::string& path);
// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file.
absl::Status WriteFileAtomic(const std::string& path,
                             std::string_view contents);

// Sidecar schema path for a table file.
std::string SchemaSidecarPath(const std::string& table_path);

}  // namespace ctsynth

#endif  // CTSYNTH_TABLE_IO_H_
