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

#ifndef MODDYN_METRICS_HPP_
#define MODDYN_METRICS_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "moddyn/labels.hpp"
#include "moddyn/scores.hpp"

namespace moddyn {

/// A score >= threshold is accepted as bonafide.
///   FAR(t) = #{spoof with score >= t} / N_spoof
///   FRR(t) = #{bonafide with score < t} / N_bonafide
/// Thresholds are -inf, every distinct score ascending, then +inf, so the
/// curve always runs from (FAR, FRR) = (1, 0) to (0, 1).
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> far;
  std::vector<double> frr;
};

struct ErrorRates {
  double far = 0.0;
  double frr = 0.0;
};

/// Throws Error(kDomain) unless both classes are present.
RocCurve RocPoints(const ScoreSet& scores);

ErrorRates RatesAtThreshold(const ScoreSet& scores, double threshold);

struct EerResult {
  double eer = 0.0;
  /// The bracketing ROC threshold with the smaller |FAR - FRR|.
  double threshold = 0.0;
};

/// Linear interpolation between the two ROC points that bracket the
/// FAR - FRR sign change; an exact crossing is returned as is.
EerResult ComputeEer(const ScoreSet& scores);
inline double Eer(const ScoreSet& scores) { return ComputeEer(scores).eer; }

/// F1 with `positive` as the positive class; bonafide is predicted for
/// score >= threshold. Zero when precision + recall = 0.
double F1AtThreshold(const ScoreSet& scores, double threshold = 0.5,
                     Label positive = Label::kBonafide);

enum class Better { kA, kB, kTie };
std::string_view BetterName(Better better);

inline constexpr double kSignificanceAlpha = 0.05;
/// Two-tailed standard normal critical value at alpha = 0.05.
inline constexpr double kCriticalZ = 1.959963984540054;

struct SignificanceResult {
  double hter_a = 0.0;
  double hter_b = 0.0;
  double z = 0.0;
  double alpha = kSignificanceAlpha;
  bool significant = false;
  Better better = Better::kTie;  // the lower-HTER system when significant
};

/// HTER = (FAR + FRR) / 2 at a fixed threshold per system, with
///   var = FAR(1-FAR) / (4 N_spoof) + FRR(1-FRR) / (4 N_bonafide)
/// and z = (HTER_a - HTER_b) / sqrt(var_a + var_b), for systems scored on
/// independent test sets. Thresholds default to each system's EER threshold.
SignificanceResult HterSignificance(const ScoreSet& a, const ScoreSet& b,
                                    std::optional<double> threshold_a = {},
                                    std::optional<double> threshold_b = {});

/// `hter_a,hter_b,z,significant,better`
std::string FormatSignificance(const SignificanceResult& r);

}  // namespace moddyn

#endif  // MODDYN_METRICS_HPP_
