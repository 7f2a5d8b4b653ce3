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

#ifndef MODDYN_MANIFEST_HPP_
#define MODDYN_MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "moddyn/labels.hpp"

namespace moddyn {

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  Label label = Label::kBonafide;
  std::string attack_id = "-";
  Split split = Split::kTrain;
};

/// CSV manifest with header `id,path,label,attack_id,split`. Relative paths
/// are resolved against `base_dir` (the manifest's directory when read).
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const ManifestEntry& entry) const;
  std::vector<ManifestEntry> Select(Split split) const;
};

inline constexpr char kManifestHeader[] = "id,path,label,attack_id,split";

/// Errors carry the 1-based line number of the offending row.
DatasetManifest ReadManifest(const std::filesystem::path& path);
DatasetManifest ParseManifest(std::string_view text,
                              const std::filesystem::path& base_dir);

void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

/// Throws Error(kIo) naming the first entry whose file does not exist.
void ValidateManifestPaths(const DatasetManifest& manifest);

}  // namespace moddyn

#endif  // MODDYN_MANIFEST_HPP_
