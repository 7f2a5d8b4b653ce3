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

#include "moddyn/manifest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

std::string_view LabelName(Label label) {
  return label == Label::kBonafide ? "bonafide" : "spoof";
}

std::optional<Label> ParseLabel(std::string_view token) {
  if (token == "bonafide") return Label::kBonafide;
  if (token == "spoof") return Label::kSpoof;
  return std::nullopt;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kEval: return "eval";
  }
  return "?";
}

std::optional<Split> ParseSplit(std::string_view token) {
  if (token == "train") return Split::kTrain;
  if (token == "valid") return Split::kValid;
  if (token == "eval") return Split::kEval;
  return std::nullopt;
}

std::filesystem::path DatasetManifest::Resolve(const ManifestEntry& entry) const {
  if (entry.path.is_absolute() || base_dir.empty()) return entry.path;
  return base_dir / entry.path;
}

std::vector<ManifestEntry> DatasetManifest::Select(Split split) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

namespace {

[[noreturn]] void Fail(ErrorCode code, std::size_t line_no,
                       const std::string& what) {
  throw Error(code, "manifest line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

DatasetManifest ParseManifest(std::string_view text,
                              const std::filesystem::path& base_dir) {
  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  std::unordered_set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kManifestHeader) {
        Fail(ErrorCode::kParse, line_no,
             "expected header '" + std::string(kManifestHeader) + "'");
      }
      have_header = true;
      continue;
    }
    auto fields = internal::SplitCsv(line);
    if (fields.size() != 5) {
      Fail(ErrorCode::kParse, line_no,
           "expected 5 fields, got " + std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.id = std::string(fields[0]);
    if (entry.id.empty()) Fail(ErrorCode::kParse, line_no, "empty id");
    if (fields[1].empty()) Fail(ErrorCode::kParse, line_no, "empty path");
    entry.path = std::filesystem::path(std::string(fields[1]));
    auto label = ParseLabel(fields[2]);
    if (!label) {
      Fail(ErrorCode::kParse, line_no,
           "unknown label '" + std::string(fields[2]) + "'");
    }
    entry.label = *label;
    entry.attack_id = fields[3].empty() ? "-" : std::string(fields[3]);
    auto split = ParseSplit(fields[4]);
    if (!split) {
      Fail(ErrorCode::kParse, line_no,
           "unknown split '" + std::string(fields[4]) + "'");
    }
    entry.split = *split;
    if (!seen.insert(entry.id).second) {
      Fail(ErrorCode::kDuplicateId, line_no, "duplicate id '" + entry.id + "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (!have_header) {
    throw Error(ErrorCode::kParse, "manifest is empty (no header row)");
  }
  return manifest;
}

DatasetManifest ReadManifest(const std::filesystem::path& path) {
  auto bytes = internal::ReadBinaryFile(path);
  std::string text(bytes.begin(), bytes.end());
  return ParseManifest(text, path.parent_path());
}

void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  std::string out = std::string(kManifestHeader) + "\n";
  std::unordered_set<std::string> seen;
  for (const auto& e : manifest.entries) {
    const std::string p = e.path.generic_string();
    for (const std::string* field : {&e.id, &p, &e.attack_id}) {
      if (field->find_first_of(",\n\r") != std::string::npos) {
        throw Error(ErrorCode::kValidation,
                    "manifest field contains a separator: " + *field);
      }
    }
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id '" + e.id + "'");
    }
    out += e.id + "," + p + "," + std::string(LabelName(e.label)) + "," +
           e.attack_id + "," + std::string(SplitName(e.split)) + "\n";
  }
  internal::AtomicWriteFile(path, std::string_view(out));
}

void ValidateManifestPaths(const DatasetManifest& manifest) {
  for (const auto& e : manifest.entries) {
    if (!std::filesystem::is_regular_file(manifest.Resolve(e))) {
      throw Error(ErrorCode::kIo, "entry '" + e.id + "': file not found: " +
                                      manifest.Resolve(e).string());
    }
  }
}

}  // namespace moddyn
