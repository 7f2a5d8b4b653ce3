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

#include "moddyn/classifier.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Keeps a saturated sigmoid inside the open interval (0,1).
double ClampOpen(double s) {
  constexpr double kLo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::min(std::max(s, kLo), hi);
}

void CheckShapes(const ModelParams& params, const RepresentationStack& stack) {
  if (params.layers() != stack.layers() ||
      params.features() != stack.features()) {
    throw Error(ErrorCode::kDimension,
                "model expects " + std::to_string(params.layers()) + "x" +
                    std::to_string(params.features()) + " stacks, got " +
                    std::to_string(stack.layers()) + "x" +
                    std::to_string(stack.features()));
  }
  if (params.b1.size() != params.hidden() || params.w2.size() != params.hidden()) {
    throw Error(ErrorCode::kDimension, "hidden layer sizes disagree");
  }
}

void CheckMask(const std::optional<DropoutMask>& mask, std::size_t hidden) {
  if (!mask) return;
  if (mask->keep.size() != hidden) {
    throw Error(ErrorCode::kDimension, "dropout mask length != hidden width");
  }
  if (!(mask->p >= 0.0 && mask->p < 1.0)) {
    throw Error(ErrorCode::kDomain, "dropout probability must be in [0,1)");
  }
}

}  // namespace

std::string_view VariantName(Variant variant) {
  return variant == Variant::kRaw ? "raw" : "proposed";
}

std::optional<Variant> ParseVariant(std::string_view token) {
  if (token == "raw") return Variant::kRaw;
  if (token == "proposed") return Variant::kProposed;
  return std::nullopt;
}

void ModelParams::Validate() const {
  if (layers() == 0 || features() == 0 || hidden() == 0) {
    throw Error(ErrorCode::kValidation, "model dimensions must be >= 1");
  }
  if (b1.size() != hidden() || w2.size() != hidden()) {
    throw Error(ErrorCode::kValidation, "hidden layer sizes disagree");
  }
  auto finite = [](std::span<const double> xs) {
    for (double x : xs) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!finite(layer_weights.values) || !finite(w1.data()) || !finite(b1) ||
      !finite(w2) || !std::isfinite(b2)) {
    throw Error(ErrorCode::kValidation, "model parameters contain NaN/Inf");
  }
}

ModelParams InitParams(Variant variant, std::size_t layers,
                       std::size_t features, std::size_t hidden,
                       std::mt19937_64& rng) {
  if (layers == 0 || features == 0 || hidden == 0) {
    throw Error(ErrorCode::kValidation, "model dimensions must be >= 1");
  }
  ModelParams p;
  p.variant = variant;
  p.layer_weights = LayerWeights::Uniform(layers);
  p.w1 = Matrix(hidden, features);
  p.b1.assign(hidden, 0.0);
  p.w2.assign(hidden, 0.0);
  const double limit1 = std::sqrt(6.0 / static_cast<double>(features + hidden));
  std::uniform_real_distribution<double> u1(-limit1, limit1);
  for (double& w : p.w1.data()) w = u1(rng);
  const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> u2(-limit2, limit2);
  for (double& w : p.w2) w = u2(rng);
  return p;
}

DropoutMask SampleDropoutMask(std::size_t hidden, double p,
                              std::mt19937_64& rng) {
  DropoutMask mask{std::vector<double>(hidden, 1.0), p};
  std::bernoulli_distribution drop(p);
  for (double& k : mask.keep) k = drop(rng) ? 0.0 : 1.0;
  return mask;
}

ForwardResult Forward(const ModelParams& params,
                      const RepresentationStack& stack, const MtbConfig& cfg,
                      const std::optional<DropoutMask>& mask) {
  CheckShapes(params, stack);
  CheckMask(mask, params.hidden());
  ForwardResult result;
  ForwardCache& c = result.cache;
  c.collapsed = LayerCollapse(stack, params.layer_weights);
  if (params.variant == Variant::kRaw) {
    c.pooled = PoolRaw(c.collapsed);
  } else {
    const FrameGeometry geometry = cfg.Resolve(stack.frame_rate());
    c.energy = ModulationEnergy(c.collapsed, geometry, cfg.window);
    c.pooled.assign(stack.features(), 0.0);
    for (std::size_t f = 0; f < stack.features(); ++f) {
      double acc = 0.0;
      for (double e : c.energy.row(f)) acc += std::log(e + cfg.epsilon);
      c.pooled[f] = acc / static_cast<double>(c.energy.cols());
    }
  }

  const std::size_t hidden = params.hidden();
  c.pre_activation.assign(hidden, 0.0);
  c.hidden.assign(hidden, 0.0);
  const double scale = mask ? 1.0 / (1.0 - mask->p) : 1.0;
  double logit = params.b2;
  for (std::size_t h = 0; h < hidden; ++h) {
    double z = params.b1[h];
    auto w = params.w1.row(h);
    for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * c.pooled[f];
    c.pre_activation[h] = z;
    double a = z > 0.0 ? z : 0.0;
    if (mask) a *= mask->keep[h] * scale;
    c.hidden[h] = a;
    logit += params.w2[h] * a;
  }
  c.logit = logit;
  result.score = ClampOpen(Sigmoid(logit));
  return result;
}

std::vector<double> PooledFeatures(const ModelParams& params,
                                   const RepresentationStack& stack,
                                   const MtbConfig& cfg) {
  return Forward(params, stack, cfg).cache.pooled;
}

double Loss(double score, double target, double w_genuine) {
  if (!(score > 0.0 && score < 1.0)) {
    throw Error(ErrorCode::kDomain, "loss needs a score in (0,1)");
  }
  return -(w_genuine * target * std::log(score) +
           (1.0 - target) * std::log1p(-score));
}

double LossFromLogit(double logit, double target, double w_genuine) {
  // -log(sigmoid(z)) = softplus(-z), -log(1 - sigmoid(z)) = softplus(z)
  auto softplus = [](double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  };
  return w_genuine * target * softplus(-logit) +
         (1.0 - target) * softplus(logit);
}

BackwardResult Backward(const ModelParams& params,
                        const RepresentationStack& stack, const MtbConfig& cfg,
                        double target, double w_genuine,
                        const std::optional<DropoutMask>& mask) {
  ForwardResult fwd = Forward(params, stack, cfg, mask);
  const ForwardCache& c = fwd.cache;
  BackwardResult out;
  out.score = fwd.score;
  out.loss = LossFromLogit(c.logit, target, w_genuine);

  const double s = Sigmoid(c.logit);
  const double d_logit = -w_genuine * target * (1.0 - s) + (1.0 - target) * s;

  const std::size_t hidden = params.hidden();
  const std::size_t features = params.features();
  Gradients& g = out.grads;
  g.b2 = d_logit;
  g.w2.assign(hidden, 0.0);
  g.b1.assign(hidden, 0.0);
  g.w1 = Matrix(hidden, features);
  std::vector<double> d_pooled(features, 0.0);
  const double scale = mask ? 1.0 / (1.0 - mask->p) : 1.0;
  for (std::size_t h = 0; h < hidden; ++h) {
    g.w2[h] = d_logit * c.hidden[h];
    double d_act = d_logit * params.w2[h];
    if (mask) d_act *= mask->keep[h] * scale;
    const double d_pre = c.pre_activation[h] > 0.0 ? d_act : 0.0;
    g.b1[h] = d_pre;
    if (d_pre == 0.0) continue;
    auto gw = g.w1.row(h);
    auto w = params.w1.row(h);
    for (std::size_t f = 0; f < features; ++f) {
      gw[f] = d_pre * c.pooled[f];
      d_pooled[f] += d_pre * w[f];
    }
  }

  Matrix d_collapsed(features, stack.frames());
  if (params.variant == Variant::kRaw) {
    const double inv_t = 1.0 / static_cast<double>(stack.frames());
    for (std::size_t f = 0; f < features; ++f) {
      for (double& v : d_collapsed.row(f)) v = d_pooled[f] * inv_t;
    }
  } else {
    const FrameGeometry geometry = cfg.Resolve(stack.frame_rate());
    const double inv_k = 1.0 / static_cast<double>(c.energy.cols());
    Matrix d_energy(features, c.energy.cols());
    for (std::size_t f = 0; f < features; ++f) {
      for (std::size_t k = 0; k < c.energy.cols(); ++k) {
        d_energy(f, k) = d_pooled[f] * inv_k / (c.energy(f, k) + cfg.epsilon);
      }
    }
    d_collapsed =
        ModulationEnergyBackward(c.collapsed, geometry, cfg.window, d_energy);
  }
  g.layer_weights = LayerCollapseBackward(stack, d_collapsed);
  return out;
}

double PredictScore(const ModelParams& params, const RepresentationStack& stack,
                    const MtbConfig& cfg) {
  return Forward(params, stack, cfg).score;
}

std::vector<double> PredictScores(const ModelParams& params,
                                  std::span<const RepresentationStack> stacks,
                                  const MtbConfig& cfg) {
  std::vector<double> out;
  out.reserve(stacks.size());
  for (const auto& s : stacks) out.push_back(PredictScore(params, s, cfg));
  return out;
}

}  // namespace moddyn
