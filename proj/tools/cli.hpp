// Copyright 2026 The edgecc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>

namespace edgecc::cli {

/// Exit codes: 0 success, 1 domain error (bad model, bad data, violations),
/// 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. Output goes to `out`, diagnostics to `err`.
/// The EDGECC_OUT_DIR environment variable, when set, is the directory for
/// outputs not given an explicit path.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edgecc::cli
