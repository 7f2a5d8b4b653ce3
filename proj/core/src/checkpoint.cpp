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

#include "moddyn/checkpoint.hpp"

#include <string>
#include <vector>

#include <json.hpp>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

namespace {

using nlohmann::json;

constexpr char kFormatTag[] = "moddyn-checkpoint";
constexpr int kFormatVersion = 1;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kCheckpointFormat, "checkpoint: " + what);
}

std::string_view WindowName(WindowFunction fn) {
  return fn == WindowFunction::kHann ? "hann" : "rectangular";
}

json MtbToJson(const MtbConfig& c) {
  json j;
  j["window_ms"] = c.window_ms;
  j["hop_ms"] = c.hop_ms;
  j["window_frames"] = c.window_frames ? json(*c.window_frames) : json(nullptr);
  j["hop_frames"] = c.hop_frames ? json(*c.hop_frames) : json(nullptr);
  j["window_function"] = WindowName(c.window);
  j["epsilon"] = c.epsilon;
  return j;
}

MtbConfig MtbFromJson(const json& j) {
  MtbConfig c;
  c.window_ms = j.at("window_ms").get<double>();
  c.hop_ms = j.at("hop_ms").get<double>();
  if (!j.at("window_frames").is_null()) {
    c.window_frames = j.at("window_frames").get<std::size_t>();
  }
  if (!j.at("hop_frames").is_null()) {
    c.hop_frames = j.at("hop_frames").get<std::size_t>();
  }
  const auto fn = j.at("window_function").get<std::string>();
  if (fn == "hann") {
    c.window = WindowFunction::kHann;
  } else if (fn == "rectangular") {
    c.window = WindowFunction::kRectangular;
  } else {
    Bad("unknown window function '" + fn + "'");
  }
  c.epsilon = j.at("epsilon").get<double>();
  return c;
}

json LogToJson(const TrainLog& log) {
  json epochs = json::array();
  for (const auto& r : log.epochs) {
    epochs.push_back({{"epoch", r.epoch},
                      {"mean_loss", r.mean_loss},
                      {"valid_eer", r.valid_eer},
                      {"lr", r.lr},
                      {"steps", r.steps}});
  }
  return {{"epochs", epochs},
          {"stop_reason", StopReasonName(log.stop_reason)},
          {"best_epoch", log.best_epoch},
          {"best_valid_eer", log.best_valid_eer}};
}

TrainLog LogFromJson(const json& j) {
  TrainLog log;
  for (const auto& e : j.at("epochs")) {
    log.epochs.push_back({e.at("epoch").get<std::size_t>(),
                          e.at("mean_loss").get<double>(),
                          e.at("valid_eer").get<double>(),
                          e.at("lr").get<double>(),
                          e.at("steps").get<std::size_t>()});
  }
  const auto reason = j.at("stop_reason").get<std::string>();
  if (reason == "max_epochs") {
    log.stop_reason = StopReason::kMaxEpochs;
  } else if (reason == "patience") {
    log.stop_reason = StopReason::kPatience;
  } else {
    Bad("unknown stop reason '" + reason + "'");
  }
  log.best_epoch = j.at("best_epoch").get<std::size_t>();
  log.best_valid_eer = j.at("best_valid_eer").get<double>();
  return log;
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  const ModelParams& p = checkpoint.params;
  p.Validate();
  json w1 = json::array();
  for (std::size_t h = 0; h < p.hidden(); ++h) {
    auto row = p.w1.row(h);
    w1.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["variant"] = VariantName(p.variant);
  doc["dims"] = {{"layers", p.layers()},
                 {"features", p.features()},
                 {"hidden", p.hidden()}};
  doc["mtb"] = MtbToJson(checkpoint.mtb);
  doc["params"] = {{"layer_weights", p.layer_weights.values},
                   {"w1", w1},
                   {"b1", p.b1},
                   {"w2", p.w2},
                   {"b2", p.b2}};
  if (checkpoint.log) doc["log"] = LogToJson(*checkpoint.log);
  return doc.dump(1) + "\n";
}

Checkpoint ParseCheckpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    Bad(std::string("not valid JSON (") + e.what() + ")");
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatTag) {
      Bad("missing format tag");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      Bad("unsupported version");
    }
    Checkpoint c;
    ModelParams& p = c.params;
    const auto variant = ParseVariant(doc.at("variant").get<std::string>());
    if (!variant) Bad("unknown variant");
    p.variant = *variant;
    const auto& dims = doc.at("dims");
    const auto layers = dims.at("layers").get<std::size_t>();
    const auto features = dims.at("features").get<std::size_t>();
    const auto hidden = dims.at("hidden").get<std::size_t>();
    c.mtb = MtbFromJson(doc.at("mtb"));
    const auto& params = doc.at("params");
    p.layer_weights.values = params.at("layer_weights").get<std::vector<double>>();
    const auto rows = params.at("w1").get<std::vector<std::vector<double>>>();
    p.b1 = params.at("b1").get<std::vector<double>>();
    p.w2 = params.at("w2").get<std::vector<double>>();
    p.b2 = params.at("b2").get<double>();
    if (p.layer_weights.size() != layers || rows.size() != hidden ||
        p.b1.size() != hidden || p.w2.size() != hidden) {
      Bad("parameter arrays disagree with dims");
    }
    p.w1 = Matrix(hidden, features);
    for (std::size_t h = 0; h < hidden; ++h) {
      if (rows[h].size() != features) Bad("w1 row has wrong length");
      std::copy(rows[h].begin(), rows[h].end(), p.w1.row(h).begin());
    }
    if (doc.contains("log")) c.log = LogFromJson(doc.at("log"));
    p.Validate();
    return c;
  } catch (const json::exception& e) {
    Bad(std::string("malformed field (") + e.what() + ")");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCheckpointFormat) throw;
    Bad(e.what());
  }
}

void SaveCheckpoint(const Checkpoint& checkpoint,
                    const std::filesystem::path& path) {
  internal::AtomicWriteFile(path, std::string_view(SerializeCheckpoint(checkpoint)));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<Variant> expected) {
  const auto bytes = internal::ReadBinaryFile(path);
  Checkpoint c = ParseCheckpoint(std::string(bytes.begin(), bytes.end()));
  if (expected && *expected != c.params.variant) {
    throw Error(ErrorCode::kVariantMismatch,
                "checkpoint holds a '" + std::string(VariantName(c.params.variant)) +
                    "' model, requested '" + std::string(VariantName(*expected)) +
                    "'");
  }
  return c;
}

}  // namespace moddyn
