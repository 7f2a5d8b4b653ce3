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

#ifndef MODDYN_TRAINER_HPP_
#define MODDYN_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moddyn/classifier.hpp"
#include "moddyn/labels.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/mtb.hpp"
#include "moddyn/repstack.hpp"
#include "moddyn/scores.hpp"

namespace moddyn {

/// How "validation EER did not decrease" is judged for early stopping.
enum class StopRule {
  kRunningBest,    // no improvement over the best EER so far
  kPreviousEpoch,  // no improvement over the immediately preceding epoch
};

enum class Optimizer {
  kAdam,  // beta1 0.9, beta2 0.999, eps 1e-8; lr follows the schedule
  kSgd,
};

std::string_view OptimizerName(Optimizer optimizer);
std::optional<Optimizer> ParseOptimizer(std::string_view token);

struct TrainConfig {
  std::size_t max_epochs = 20;
  double lr_start = 1e-4;
  double lr_end = 1e-5;
  std::size_t patience = 3;
  double w_genuine = kDefaultGenuineWeight;
  double dropout_p = kDefaultDropout;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::size_t hidden = kDefaultHidden;
  StopRule stop_rule = StopRule::kRunningBest;
  Optimizer optimizer = Optimizer::kAdam;
  double improvement_tolerance = 1e-6;

  /// Throws Error(kValidation) on an unusable schedule.
  void Validate() const;
};

struct TrainExample {
  std::string id;
  RepresentationStack stack;
  Label label = Label::kBonafide;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double valid_eer = 0.0;
  double lr = 0.0;
  std::size_t steps = 0;
};

enum class StopReason { kMaxEpochs, kPatience };
std::string_view StopReasonName(StopReason reason);

struct TrainLog {
  std::vector<EpochRecord> epochs;
  StopReason stop_reason = StopReason::kMaxEpochs;
  std::size_t best_epoch = 0;
  double best_valid_eer = 1.0;

  friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

inline bool operator==(const EpochRecord& a, const EpochRecord& b) {
  return a.epoch == b.epoch && a.mean_loss == b.mean_loss &&
         a.valid_eer == b.valid_eer && a.lr == b.lr && a.steps == b.steps;
}

struct TrainResult {
  ModelParams params;  // parameters of the best validation epoch
  TrainLog log;
};

/// Linear from lr_start at epoch 0 to lr_end at epoch max_epochs - 1.
double LrAtEpoch(std::size_t epoch, const TrainConfig& cfg);

/// Batch-size-1 training with weighted BCE and inverted dropout on the hidden
/// layer. Initialization, shuffling and dropout masks all come from one
/// generator seeded with cfg.seed. Throws Error(kConfig) when either split is
/// empty or lacks a class, Error(kDimension) when stack shapes disagree.
TrainResult Train(std::span<const TrainExample> train,
                  std::span<const TrainExample> valid, Variant variant,
                  const MtbConfig& mtb, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Mean weighted BCE over a set, inference mode.
double MeanLoss(const ModelParams& params, std::span<const TrainExample> set,
                const MtbConfig& mtb, double w_genuine);

ScoreSet Evaluate(const ModelParams& params,
                  std::span<const TrainExample> examples, const MtbConfig& mtb);

/// Scores the entries of one split, reading each stack from disk in turn.
ScoreSet Evaluate(const ModelParams& params, const DatasetManifest& manifest,
                  Split split, const MtbConfig& mtb);

std::vector<TrainExample> LoadExamples(const DatasetManifest& manifest,
                                       Split split);

/// `epoch,loss,valid_eer,lr`
std::string FormatEpochRecord(const EpochRecord& record);

}  // namespace moddyn

#endif  // MODDYN_TRAINER_HPP_
