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

#include "moddyn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "moddyn/error.hpp"
#include "moddyn/metrics.hpp"

namespace moddyn {

namespace {

void RequireTwoClasses(std::span<const TrainExample> set, std::string_view name) {
  std::size_t bona = 0;
  std::size_t spoof = 0;
  for (const auto& ex : set) {
    (ex.label == Label::kBonafide ? bona : spoof)++;
  }
  if (bona == 0 || spoof == 0) {
    throw Error(ErrorCode::kConfig,
                std::string(name) + " split must contain both bonafide and "
                                    "spoof examples (has " +
                    std::to_string(bona) + " bonafide, " +
                    std::to_string(spoof) + " spoof)");
  }
}

void RequireShape(std::span<const TrainExample> set, std::size_t layers,
                  std::size_t features) {
  for (const auto& ex : set) {
    if (ex.stack.layers() != layers || ex.stack.features() != features) {
      throw Error(ErrorCode::kDimension,
                  "example '" + ex.id + "' has a different layer/feature shape");
    }
  }
}

std::vector<std::span<double>> ParamViews(ModelParams& p) {
  return {p.layer_weights.values, p.w1.data(), p.b1, p.w2, {&p.b2, 1}};
}

std::vector<std::span<const double>> GradViews(const Gradients& g) {
  return {g.layer_weights, g.w1.data(), g.b1, g.w2, {&g.b2, 1}};
}

// Plain SGD or Adam over the flattened parameter vector.
class Stepper {
 public:
  Stepper(Optimizer kind, const ModelParams& params) : kind_(kind) {
    if (kind_ == Optimizer::kAdam) {
      const std::size_t n = params.layers() + params.w1.data().size() +
                            2 * params.hidden() + 1;
      m_.assign(n, 0.0);
      v_.assign(n, 0.0);
    }
  }

  void Step(ModelParams& params, const Gradients& grads, double lr) {
    auto ps = ParamViews(params);
    auto gs = GradViews(grads);
    if (kind_ == Optimizer::kSgd) {
      for (std::size_t b = 0; b < ps.size(); ++b) {
        for (std::size_t i = 0; i < ps[b].size(); ++i) ps[b][i] -= lr * gs[b][i];
      }
      return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    std::size_t j = 0;
    for (std::size_t b = 0; b < ps.size(); ++b) {
      for (std::size_t i = 0; i < ps[b].size(); ++i, ++j) {
        const double g = gs[b][i];
        m_[j] = kBeta1 * m_[j] + (1.0 - kBeta1) * g;
        v_[j] = kBeta2 * v_[j] + (1.0 - kBeta2) * g * g;
        ps[b][i] -= lr * (m_[j] / c1) / (std::sqrt(v_[j] / c2) + kEps);
      }
    }
  }

 private:
  Optimizer kind_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t t_ = 0;
};

}  // namespace

void TrainConfig::Validate() const {
  if (max_epochs < 1) throw Error(ErrorCode::kValidation, "max_epochs must be >= 1");
  if (patience < 1) throw Error(ErrorCode::kValidation, "patience must be >= 1");
  if (!(lr_end > 0.0) || !(lr_start >= lr_end) || !std::isfinite(lr_start)) {
    throw Error(ErrorCode::kValidation, "need lr_start >= lr_end > 0");
  }
  if (!(w_genuine > 0.0)) {
    throw Error(ErrorCode::kValidation, "genuine weight must be positive");
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw Error(ErrorCode::kValidation, "dropout must be in [0,1)");
  }
  if (hidden < 1) throw Error(ErrorCode::kValidation, "hidden width must be >= 1");
}

std::string_view OptimizerName(Optimizer optimizer) {
  return optimizer == Optimizer::kAdam ? "adam" : "sgd";
}

std::optional<Optimizer> ParseOptimizer(std::string_view token) {
  if (token == "adam") return Optimizer::kAdam;
  if (token == "sgd") return Optimizer::kSgd;
  return std::nullopt;
}

std::string_view StopReasonName(StopReason reason) {
  return reason == StopReason::kMaxEpochs ? "max_epochs" : "patience";
}

double LrAtEpoch(std::size_t epoch, const TrainConfig& cfg) {
  if (cfg.max_epochs <= 1) return cfg.lr_start;
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * static_cast<double>(epoch) /
                            static_cast<double>(cfg.max_epochs - 1);
}

TrainResult Train(std::span<const TrainExample> train,
                  std::span<const TrainExample> valid, Variant variant,
                  const MtbConfig& mtb, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.Validate();
  if (train.empty()) throw Error(ErrorCode::kConfig, "train split is empty");
  if (valid.empty()) throw Error(ErrorCode::kConfig, "valid split is empty");
  RequireTwoClasses(train, "train");
  RequireTwoClasses(valid, "valid");
  const std::size_t layers = train.front().stack.layers();
  const std::size_t features = train.front().stack.features();
  RequireShape(train, layers, features);
  RequireShape(valid, layers, features);
  // Fail on a bad window before any work is done.
  mtb.Resolve(train.front().stack.frame_rate());

  std::mt19937_64 rng(cfg.seed);
  ModelParams params = InitParams(variant, layers, features, cfg.hidden, rng);
  Stepper stepper(cfg.optimizer, params);

  TrainResult result;
  result.params = params;
  TrainLog& log = result.log;
  double best = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  log.stop_reason = StopReason::kMaxEpochs;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    const double lr = LrAtEpoch(epoch, cfg);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t idx : order) {
      const TrainExample& ex = train[idx];
      std::optional<DropoutMask> mask;
      if (cfg.dropout_p > 0.0) {
        mask = SampleDropoutMask(params.hidden(), cfg.dropout_p, rng);
      }
      const BackwardResult br = Backward(params, ex.stack, mtb,
                                         LabelTarget(ex.label), cfg.w_genuine, mask);
      stepper.Step(params, br.grads, lr);
      loss_sum += br.loss;
      ++steps;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(steps);
    rec.valid_eer = Eer(Evaluate(params, valid, mtb));
    rec.lr = lr;
    rec.steps = steps;
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const double tol = cfg.improvement_tolerance;
    const bool new_best = rec.valid_eer < best - tol;
    if (new_best) {
      best = rec.valid_eer;
      result.params = params;
      log.best_epoch = epoch;
      log.best_valid_eer = rec.valid_eer;
    }
    const bool improved = cfg.stop_rule == StopRule::kRunningBest
                              ? new_best
                              : rec.valid_eer < previous - tol;
    previous = rec.valid_eer;
    stale = improved ? 0 : stale + 1;
    if (stale >= cfg.patience) {
      log.stop_reason = StopReason::kPatience;
      break;
    }
  }
  return result;
}

double MeanLoss(const ModelParams& params, std::span<const TrainExample> set,
                const MtbConfig& mtb, double w_genuine) {
  double sum = 0.0;
  for (const auto& ex : set) {
    const ForwardResult fwd = Forward(params, ex.stack, mtb);
    sum += LossFromLogit(fwd.cache.logit, LabelTarget(ex.label), w_genuine);
  }
  return set.empty() ? 0.0 : sum / static_cast<double>(set.size());
}

ScoreSet Evaluate(const ModelParams& params,
                  std::span<const TrainExample> examples, const MtbConfig& mtb) {
  ScoreSet out;
  out.items.reserve(examples.size());
  for (const auto& ex : examples) {
    out.items.push_back({ex.id, PredictScore(params, ex.stack, mtb), ex.label});
  }
  return out;
}

ScoreSet Evaluate(const ModelParams& params, const DatasetManifest& manifest,
                  Split split, const MtbConfig& mtb) {
  ScoreSet out;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    RepresentationStack stack;
    try {
      stack = ReadStack(manifest.Resolve(e));
    } catch (const Error& err) {
      throw Error(err.code(), "entry '" + e.id + "': " + err.what());
    }
    out.items.push_back({e.id, PredictScore(params, stack, mtb), e.label});
  }
  return out;
}

std::vector<TrainExample> LoadExamples(const DatasetManifest& manifest,
                                       Split split) {
  std::vector<TrainExample> out;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    try {
      out.push_back({e.id, ReadStack(manifest.Resolve(e)), e.label});
    } catch (const Error& err) {
      throw Error(err.code(), "entry '" + e.id + "': " + err.what());
    }
  }
  return out;
}

std::string FormatEpochRecord(const EpochRecord& record) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.4f,%.3e", record.epoch,
                record.mean_loss, record.valid_eer, record.lr);
  return buf;
}

}  // namespace moddyn
