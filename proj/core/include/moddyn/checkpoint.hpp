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

#ifndef MODDYN_CHECKPOINT_HPP_
#define MODDYN_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "moddyn/classifier.hpp"
#include "moddyn/mtb.hpp"
#include "moddyn/trainer.hpp"

namespace moddyn {

/// Everything needed to score a stack again: the variant-tagged parameters,
/// the MTB configuration they were trained with, and optionally the log.
struct Checkpoint {
  ModelParams params;
  MtbConfig mtb;
  std::optional<TrainLog> log;
};

/// JSON document; every double is written with round-trip precision.
std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint ParseCheckpoint(std::string_view text);

void SaveCheckpoint(const Checkpoint& checkpoint,
                    const std::filesystem::path& path);

/// Throws Error(kCheckpointFormat) on malformed content and
/// Error(kVariantMismatch) when `expected` is given and differs.
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<Variant> expected = std::nullopt);

}  // namespace moddyn

#endif  // MODDYN_CHECKPOINT_HPP_
