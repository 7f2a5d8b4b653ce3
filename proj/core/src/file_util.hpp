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

#ifndef MODDYN_SRC_FILE_UTIL_HPP_
#define MODDYN_SRC_FILE_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moddyn::internal {

// Writes to "<path>.tmp" and renames over `path`.
void AtomicWriteFile(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void AtomicWriteFile(const std::filesystem::path& path, std::string_view text);

std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path& path);

// Splits on commas; no quoting. A trailing '\r' is stripped first.
std::vector<std::string_view> SplitCsv(std::string_view line);

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);
bool ParseDouble(std::string_view text, double* value);

}  // namespace moddyn::internal

#endif  // MODDYN_SRC_FILE_UTIL_HPP_
