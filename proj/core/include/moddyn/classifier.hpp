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

#ifndef MODDYN_CLASSIFIER_HPP_
#define MODDYN_CLASSIFIER_HPP_

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "moddyn/matrix.hpp"
#include "moddyn/mtb.hpp"
#include "moddyn/repstack.hpp"

namespace moddyn {

/// Which representation feeds the head: the time-pooled weighted sum of
/// layers, or the feature-wise pooled modulation representation.
enum class Variant { kRaw, kProposed };

std::string_view VariantName(Variant variant);
std::optional<Variant> ParseVariant(std::string_view token);

inline constexpr std::size_t kDefaultHidden = 128;
inline constexpr double kDefaultDropout = 0.25;
inline constexpr double kDefaultGenuineWeight = 10.0;

/// Layer weights plus a two-layer head:
///   score = sigmoid(w2 . dropout(relu(W1 v + b1)) + b2)
struct ModelParams {
  Variant variant = Variant::kProposed;
  LayerWeights layer_weights;
  Matrix w1;               // hidden x features
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  std::size_t layers() const { return layer_weights.size(); }
  std::size_t features() const { return w1.cols(); }
  std::size_t hidden() const { return w1.rows(); }

  /// Shapes agree and every value is finite; throws Error(kValidation).
  void Validate() const;
};

/// Glorot-uniform FC weights, zero biases, layer weights 1/L.
ModelParams InitParams(Variant variant, std::size_t layers,
                       std::size_t features, std::size_t hidden,
                       std::mt19937_64& rng);

/// Inverted dropout: kept units are scaled by 1/(1-p).
struct DropoutMask {
  std::vector<double> keep;  // 1 = kept, 0 = dropped
  double p = 0.0;
};

DropoutMask SampleDropoutMask(std::size_t hidden, double p,
                              std::mt19937_64& rng);

struct ForwardCache {
  Matrix collapsed;                     // F x T
  Matrix energy;                        // F x K, proposed only
  std::vector<double> pooled;           // F
  std::vector<double> pre_activation;   // H
  std::vector<double> hidden;           // H, after dropout
  double logit = 0.0;
};

struct ForwardResult {
  double score = 0.5;
  ForwardCache cache;
};

/// Throws Error(kDimension) when the stack's layers/features do not match.
ForwardResult Forward(const ModelParams& params,
                      const RepresentationStack& stack, const MtbConfig& cfg,
                      const std::optional<DropoutMask>& mask = std::nullopt);

/// The pooled F-dim vector the head sees.
std::vector<double> PooledFeatures(const ModelParams& params,
                                   const RepresentationStack& stack,
                                   const MtbConfig& cfg);

/// Weighted BCE, -[w y log s + (1-y) log(1-s)]. Throws Error(kDomain) unless
/// 0 < score < 1.
double Loss(double score, double target,
            double w_genuine = kDefaultGenuineWeight);

/// Same loss evaluated from the logit without forming the sigmoid.
double LossFromLogit(double logit, double target, double w_genuine);

struct Gradients {
  std::vector<double> layer_weights;
  Matrix w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

struct BackwardResult {
  Gradients grads;
  double score = 0.5;
  double loss = 0.0;
};

/// Exact gradient of LossFromLogit with respect to every parameter. Through
/// the proposed path the chain is log -> bin mean -> |.|^2 -> STFT ->
/// layer collapse.
BackwardResult Backward(const ModelParams& params,
                        const RepresentationStack& stack, const MtbConfig& cfg,
                        double target,
                        double w_genuine = kDefaultGenuineWeight,
                        const std::optional<DropoutMask>& mask = std::nullopt);

/// Inference-mode forward (no dropout).
double PredictScore(const ModelParams& params, const RepresentationStack& stack,
                    const MtbConfig& cfg);
std::vector<double> PredictScores(const ModelParams& params,
                                  std::span<const RepresentationStack> stacks,
                                  const MtbConfig& cfg);

}  // namespace moddyn

#endif  // MODDYN_CLASSIFIER_HPP_
