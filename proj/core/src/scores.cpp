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

#include "moddyn/scores.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

std::size_t ScoreSet::Count(Label label) const {
  std::size_t n = 0;
  for (const auto& item : items) n += item.label == label;
  return n;
}

void ValidateScores(const ScoreSet& scores) {
  std::unordered_set<std::string> seen;
  for (const auto& item : scores.items) {
    if (!std::isfinite(item.score) || !(item.score > 0.0 && item.score < 1.0)) {
      throw Error(ErrorCode::kRange, "score for '" + item.id +
                                         "' outside (0,1): " +
                                         internal::FormatDouble(item.score));
    }
    if (!seen.insert(item.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate score id '" + item.id + "'");
    }
  }
}

ScoreSet ParseScores(std::string_view text) {
  ScoreSet set;
  std::unordered_set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto where = [&line_no] { return "scores line " + std::to_string(line_no) + ": "; };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kScoresHeader) {
        throw Error(ErrorCode::kParse,
                    where() + "expected header '" + kScoresHeader + "'");
      }
      have_header = true;
      continue;
    }
    auto fields = internal::SplitCsv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse, where() + "expected 3 fields");
    }
    ScoreItem item;
    item.id = std::string(fields[0]);
    if (item.id.empty()) throw Error(ErrorCode::kParse, where() + "empty id");
    if (!internal::ParseDouble(fields[1], &item.score)) {
      throw Error(ErrorCode::kParse,
                  where() + "bad score '" + std::string(fields[1]) + "'");
    }
    if (!std::isfinite(item.score) || !(item.score > 0.0 && item.score < 1.0)) {
      throw Error(ErrorCode::kRange,
                  where() + "score " + std::string(fields[1]) + " outside (0,1)");
    }
    auto label = ParseLabel(fields[2]);
    if (!label) {
      throw Error(ErrorCode::kParse,
                  where() + "unknown label '" + std::string(fields[2]) + "'");
    }
    item.label = *label;
    if (!seen.insert(item.id).second) {
      throw Error(ErrorCode::kDuplicateId, where() + "duplicate id '" + item.id + "'");
    }
    set.items.push_back(std::move(item));
  }
  if (!have_header) {
    throw Error(ErrorCode::kParse, "scores file is empty (no header row)");
  }
  return set;
}

ScoreSet ReadScores(const std::filesystem::path& path) {
  auto bytes = internal::ReadBinaryFile(path);
  return ParseScores(std::string(bytes.begin(), bytes.end()));
}

std::string FormatScores(const ScoreSet& scores) {
  std::string out = std::string(kScoresHeader) + "\n";
  for (const auto& item : scores.items) {
    out += item.id + "," + internal::FormatDouble(item.score) + "," +
           std::string(LabelName(item.label)) + "\n";
  }
  return out;
}

void WriteScores(const ScoreSet& scores, const std::filesystem::path& path) {
  ValidateScores(scores);
  for (const auto& item : scores.items) {
    if (item.id.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::kValidation, "score id contains a separator: " + item.id);
    }
  }
  internal::AtomicWriteFile(path, std::string_view(FormatScores(scores)));
}

}  // namespace moddyn
