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

#ifndef MODDYN_LABELS_HPP_
#define MODDYN_LABELS_HPP_

#include <optional>
#include <string_view>

namespace moddyn {

/// Bonafide is the positive class: score = P(bonafide), target y = 1.
enum class Label { kBonafide, kSpoof };

enum class Split { kTrain, kValid, kEval };

std::string_view LabelName(Label label);
std::optional<Label> ParseLabel(std::string_view token);

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view token);

inline double LabelTarget(Label label) {
  return label == Label::kBonafide ? 1.0 : 0.0;
}

}  // namespace moddyn

#endif  // MODDYN_LABELS_HPP_
