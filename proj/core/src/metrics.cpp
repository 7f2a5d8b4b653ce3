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

#include "moddyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

void RequireBothClasses(const ScoreSet& scores, std::string_view what) {
  if (scores.Count(Label::kBonafide) == 0 || scores.Count(Label::kSpoof) == 0) {
    throw Error(ErrorCode::kDomain,
                std::string(what) + " needs both bonafide and spoof scores");
  }
}

}  // namespace

RocCurve RocPoints(const ScoreSet& scores) {
  RequireBothClasses(scores, "ROC");
  std::vector<std::pair<double, Label>> sorted;
  sorted.reserve(scores.size());
  for (const auto& item : scores.items) sorted.emplace_back(item.score, item.label);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  const double n_bona = static_cast<double>(scores.Count(Label::kBonafide));
  const double n_spoof = static_cast<double>(scores.Count(Label::kSpoof));
  constexpr double kInf = std::numeric_limits<double>::infinity();

  RocCurve roc;
  roc.thresholds.push_back(-kInf);
  roc.far.push_back(1.0);
  roc.frr.push_back(0.0);
  // Walking upwards: everything below the current threshold is rejected.
  std::size_t bona_below = 0;
  std::size_t spoof_below = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].first;
    roc.thresholds.push_back(t);
    roc.far.push_back((n_spoof - static_cast<double>(spoof_below)) / n_spoof);
    roc.frr.push_back(static_cast<double>(bona_below) / n_bona);
    for (; i < sorted.size() && sorted[i].first == t; ++i) {
      if (sorted[i].second == Label::kBonafide) {
        ++bona_below;
      } else {
        ++spoof_below;
      }
    }
  }
  roc.thresholds.push_back(kInf);
  roc.far.push_back(0.0);
  roc.frr.push_back(1.0);
  return roc;
}

ErrorRates RatesAtThreshold(const ScoreSet& scores, double threshold) {
  RequireBothClasses(scores, "error rates");
  std::size_t spoof_accepted = 0;
  std::size_t bona_rejected = 0;
  for (const auto& item : scores.items) {
    if (item.label == Label::kSpoof) {
      spoof_accepted += item.score >= threshold;
    } else {
      bona_rejected += item.score < threshold;
    }
  }
  return {static_cast<double>(spoof_accepted) /
              static_cast<double>(scores.Count(Label::kSpoof)),
          static_cast<double>(bona_rejected) /
              static_cast<double>(scores.Count(Label::kBonafide))};
}

EerResult ComputeEer(const ScoreSet& scores) {
  // Rate differences are ratios of counts; equal gaps can round apart.
  constexpr double kTieTolerance = 1e-12;
  const RocCurve roc = RocPoints(scores);
  // FAR - FRR starts at +1 and ends at -1 and never increases.
  for (std::size_t i = 0; i + 1 < roc.far.size(); ++i) {
    const double d0 = roc.far[i] - roc.frr[i];
    const double d1 = roc.far[i + 1] - roc.frr[i + 1];
    if (d0 == 0.0) return {roc.far[i], roc.thresholds[i]};
    if (d1 == 0.0) return {roc.far[i + 1], roc.thresholds[i + 1]};
    if (d0 > 0.0 && d1 < 0.0) {
      const double a = d0 / (d0 - d1);
      const double eer = roc.far[i] + a * (roc.far[i + 1] - roc.far[i]);
      const double threshold =
          std::abs(d1) < std::abs(d0) - kTieTolerance ? roc.thresholds[i + 1]
                                                      : roc.thresholds[i];
      return {eer, threshold};
    }
  }
  // Unreachable: the sentinels guarantee a sign change.
  throw Error(ErrorCode::kDomain, "ROC curve has no FAR/FRR crossing");
}

double F1AtThreshold(const ScoreSet& scores, double threshold, Label positive) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& item : scores.items) {
    const Label predicted =
        item.score >= threshold ? Label::kBonafide : Label::kSpoof;
    const bool pred_pos = predicted == positive;
    const bool true_pos = item.label == positive;
    tp += pred_pos && true_pos;
    fp += pred_pos && !true_pos;
    fn += !pred_pos && true_pos;
  }
  const double precision =
      tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall =
      tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string_view BetterName(Better better) {
  switch (better) {
    case Better::kA: return "A";
    case Better::kB: return "B";
    case Better::kTie: return "tie";
  }
  return "?";
}

SignificanceResult HterSignificance(const ScoreSet& a, const ScoreSet& b,
                                    std::optional<double> threshold_a,
                                    std::optional<double> threshold_b) {
  RequireBothClasses(a, "significance test (system A)");
  RequireBothClasses(b, "significance test (system B)");
  auto hter_and_var = [](const ScoreSet& s, std::optional<double> threshold) {
    const double t = threshold ? *threshold : ComputeEer(s).threshold;
    const ErrorRates r = RatesAtThreshold(s, t);
    const double n_spoof = static_cast<double>(s.Count(Label::kSpoof));
    const double n_bona = static_cast<double>(s.Count(Label::kBonafide));
    const double var = r.far * (1.0 - r.far) / (4.0 * n_spoof) +
                       r.frr * (1.0 - r.frr) / (4.0 * n_bona);
    return std::pair{(r.far + r.frr) / 2.0, var};
  };
  const auto [hter_a, var_a] = hter_and_var(a, threshold_a);
  const auto [hter_b, var_b] = hter_and_var(b, threshold_b);

  SignificanceResult r;
  r.hter_a = hter_a;
  r.hter_b = hter_b;
  const double diff = hter_a - hter_b;
  const double denom = std::sqrt(var_a + var_b);
  if (diff == 0.0) {
    r.z = 0.0;
  } else if (denom == 0.0) {
    r.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    r.z = diff / denom;
  }
  r.significant = std::abs(r.z) > kCriticalZ;
  if (r.significant) r.better = r.z < 0.0 ? Better::kA : Better::kB;
  return r;
}

std::string FormatSignificance(const SignificanceResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%s,%s", r.hter_a, r.hter_b,
                r.z, r.significant ? "true" : "false",
                std::string(BetterName(r.better)).c_str());
  return buf;
}

}  // namespace moddyn
