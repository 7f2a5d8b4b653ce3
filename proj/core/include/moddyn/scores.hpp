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

#ifndef MODDYN_SCORES_HPP_
#define MODDYN_SCORES_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "moddyn/labels.hpp"

namespace moddyn {

struct ScoreItem {
  std::string id;
  double score = 0.5;  // P(bonafide), open interval (0,1)
  Label label = Label::kBonafide;
};

struct ScoreSet {
  std::vector<ScoreItem> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  std::size_t Count(Label label) const;
};

inline constexpr char kScoresHeader[] = "id,score,label";

/// Checks unique ids and scores in (0,1).
void ValidateScores(const ScoreSet& scores);

ScoreSet ReadScores(const std::filesystem::path& path);
ScoreSet ParseScores(std::string_view text);

/// Scores are written with the shortest round-trip decimal representation.
void WriteScores(const ScoreSet& scores, const std::filesystem::path& path);
std::string FormatScores(const ScoreSet& scores);

}  // namespace moddyn

#endif  // MODDYN_SCORES_HPP_
