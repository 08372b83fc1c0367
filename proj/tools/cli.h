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

// Command-line front end: tabulate, synthesize, account, audit, curve and
// utility subcommands.
//
// Exit codes: 0 success, 1 validation error (bad flags, invalid parameters,
// malformed input), 2 I/O error. Output files are written only after every
// computation succeeded, and atomically.

#ifndef CTSYNTH_TOOLS_CLI_H_
#define CTSYNTH_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"

namespace ctsynth {

inline constexpr char kToolVersion[] = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

int ExitCodeFor(const absl::Status& status);

// FNV-1a 64-bit, printed as 16 hex digits.
std::string HashHex(std::string_view data);

// args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace ctsynth

#endif  // CTSYNTH_TOOLS_CLI_H_
