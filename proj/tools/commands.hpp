// Copyright 2026  The moddyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MODDYN_TOOLS_COMMANDS_HPP_
#define MODDYN_TOOLS_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace moddyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

/// Runs `moddyn <cmd> [flags]`. args[0] is the program name. Normal output
/// goes to `out`, diagnostics to `err`; returns the process exit code.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace moddyn::cli

#endif  // MODDYN_TOOLS_COMMANDS_HPP_
