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

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moddyn/checkpoint.hpp"
#include "moddyn/classifier.hpp"
#include "moddyn/error.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/metrics.hpp"
#include "moddyn/mtb.hpp"
#include "moddyn/repstack.hpp"
#include "moddyn/scores.hpp"
#include "moddyn/synthgen.hpp"
#include "moddyn/trainer.hpp"

namespace moddyn::cli {

namespace {

namespace fs = std::filesystem;

// A flag combination that parses but is unusable.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

struct MtbFlags {
  double window_ms = 128.0;
  double hop_ms = 32.0;
  std::size_t window_frames = 0;  // 0 = derive from window_ms
  std::size_t hop_frames = 0;
  std::string window = "hann";
  double epsilon = 1e-10;

  void Add(CLI::App* app) {
    app->add_option("--window-ms", window_ms, "STFT window length in ms")
        ->check(CLI::PositiveNumber);
    app->add_option("--hop-ms", hop_ms, "STFT hop length in ms")
        ->check(CLI::PositiveNumber);
    app->add_option("--window-frames", window_frames,
                    "STFT window in frames (overrides --window-ms)")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    app->add_option("--hop-frames", hop_frames,
                    "STFT hop in frames (overrides --hop-ms)")
        ->check(CLI::PositiveNumber);
    app->add_option("--window", window, "window function")
        ->check(CLI::IsMember({"hann", "rectangular"}));
    app->add_option("--epsilon", epsilon, "offset inside the log")
        ->check(CLI::PositiveNumber);
  }

  MtbConfig ToConfig() const {
    MtbConfig c;
    c.window_ms = window_ms;
    c.hop_ms = hop_ms;
    if (window_frames > 0) c.window_frames = window_frames;
    if (hop_frames > 0) c.hop_frames = hop_frames;
    c.window = window == "hann" ? WindowFunction::kHann : WindowFunction::kRectangular;
    c.epsilon = epsilon;
    if (c.window_frames && c.hop_frames && *c.hop_frames > *c.window_frames) {
      throw UsageError("--hop-frames must not exceed --window-frames");
    }
    return c;
  }
};

// Layer weights and MTB settings from a checkpoint, or uniform weights and
// the command-line MTB settings.
struct TransformSource {
  std::optional<Checkpoint> checkpoint;
  MtbConfig mtb;

  LayerWeights WeightsFor(const RepresentationStack& stack) const {
    if (checkpoint) return checkpoint->params.layer_weights;
    return LayerWeights::Uniform(stack.layers());
  }
};

TransformSource MakeSource(const std::string& checkpoint_path,
                           const MtbFlags& flags) {
  TransformSource src;
  src.mtb = flags.ToConfig();
  if (!checkpoint_path.empty()) {
    src.checkpoint = LoadCheckpoint(checkpoint_path);
    src.mtb = src.checkpoint->mtb;
  }
  return src;
}

std::optional<Split> SplitFlag(const std::string& token) {
  if (token == "all") return std::nullopt;
  return ParseSplit(token);
}

// --- transform --------------------------------------------------------------

struct TransformArgs {
  std::string manifest;
  std::string split = "all";
  std::string out;
  std::string checkpoint;
  MtbFlags mtb;
};

int RunTransform(const TransformArgs& a, std::ostream& out, std::ostream& err) {
  const TransformSource src = MakeSource(a.checkpoint, a.mtb);
  const DatasetManifest manifest = ReadManifest(a.manifest);
  const auto split = SplitFlag(a.split);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + a.out);
  std::size_t done = 0;
  std::size_t failed = 0;
  for (const auto& e : manifest.entries) {
    if (split && e.split != *split) continue;
    try {
      const RepresentationStack stack = ReadStack(manifest.Resolve(e));
      const ModulationRepresentation m =
          MtbTransform(stack, src.WeightsFor(stack), src.mtb);
      WriteModulationText(m, fs::path(a.out) / (e.id + ".csv"));
      ++done;
    } catch (const Error& error) {
      err << "error: entry '" << e.id << "': " << error.what() << "\n";
      ++failed;
    }
  }
  out << "transformed " << done << " of " << done + failed << " utterances\n";
  return failed == 0 ? kExitOk : kExitData;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string variant = "proposed";
  std::string out;
  std::string optimizer = "adam";
  std::string stop_rule = "best";
  TrainConfig cfg;
  MtbFlags mtb;
};

int RunTrain(TrainArgs a, std::ostream& out, std::ostream&) {
  const MtbConfig mtb = a.mtb.ToConfig();
  a.cfg.optimizer = *ParseOptimizer(a.optimizer);
  a.cfg.stop_rule =
      a.stop_rule == "best" ? StopRule::kRunningBest : StopRule::kPreviousEpoch;
  try {
    a.cfg.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Variant variant = *ParseVariant(a.variant);
  const DatasetManifest manifest = ReadManifest(a.manifest);
  const auto train = LoadExamples(manifest, Split::kTrain);
  const auto valid = LoadExamples(manifest, Split::kValid);

  out << "epoch,loss,valid_eer,lr\n";
  const TrainResult result =
      Train(train, valid, variant, mtb, a.cfg, [&out](const EpochRecord& r) {
        out << FormatEpochRecord(r) << "\n" << std::flush;
      });
  SaveCheckpoint({result.params, mtb, result.log}, a.out);
  out << "best_valid_eer=" << Fmt("%.4f", result.log.best_valid_eer)
      << ",best_epoch=" << result.log.best_epoch
      << ",stop=" << StopReasonName(result.log.stop_reason) << "\n";
  return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string split = "eval";
  std::string variant;
  std::string out;
  std::string f1_positive = "bonafide";
  double threshold = 0.5;
};

int RunEval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  std::optional<Variant> expected;
  if (!a.variant.empty()) expected = ParseVariant(a.variant);
  const Checkpoint ckpt = LoadCheckpoint(a.checkpoint, expected);
  const DatasetManifest manifest = ReadManifest(a.manifest);
  const ScoreSet scores =
      Evaluate(ckpt.params, manifest, *ParseSplit(a.split), ckpt.mtb);
  if (!a.out.empty()) WriteScores(scores, a.out);
  const double eer = Eer(scores);
  const double f1 = F1AtThreshold(scores, a.threshold, *ParseLabel(a.f1_positive));
  out << "eer=" << Fmt("%.4f", eer) << ",f1=" << Fmt("%.4f", f1) << "\n";
  return kExitOk;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string scores_a;
  std::string scores_b;
  std::optional<double> threshold_a;
  std::optional<double> threshold_b;
};

int RunCompare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  const ScoreSet sa = ReadScores(a.scores_a);
  const ScoreSet sb = ReadScores(a.scores_b);
  out << FormatSignificance(HterSignificance(sa, sb, a.threshold_a, a.threshold_b))
      << "\n";
  return kExitOk;
}

// --- visualize --------------------------------------------------------------

struct VisualizeArgs {
  std::vector<std::string> stacks;
  std::string reference;
  std::string checkpoint;
  std::string out;
  MtbFlags mtb;
};

int RunVisualize(const VisualizeArgs& a, std::ostream& out, std::ostream&) {
  const TransformSource src = MakeSource(a.checkpoint, a.mtb);
  const RepresentationStack ref_stack = ReadStack(a.reference);
  const ModulationRepresentation ref =
      MtbTransform(ref_stack, src.WeightsFor(ref_stack), src.mtb);
  std::string table = "stack";
  for (double hz : ref.bin_freqs) table += "," + Fmt("%.4f", hz);
  table += "\n";
  for (const auto& path : a.stacks) {
    const RepresentationStack stack = ReadStack(path);
    const auto pattern =
        FeatureMeanPattern(MtbTransform(stack, src.WeightsFor(stack), src.mtb), ref);
    table += path;
    for (double v : pattern) table += "," + Fmt("%.6f", v);
    table += "\n";
  }
  if (a.out.empty()) {
    out << table;
  } else {
    std::ofstream file(a.out, std::ios::trunc);
    file << table;
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + a.out);
  }
  return kExitOk;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  std::size_t n_train = 200;
  std::size_t n_valid = 50;
  std::size_t n_eval = 100;
  std::optional<std::size_t> n_all;
  std::string out;
};

int RunSynth(SynthArgs a, std::ostream& out, std::ostream&) {
  try {
    a.spec.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  SplitCounts counts{a.n_train, a.n_valid, a.n_eval};
  if (a.n_all) counts = {*a.n_all, *a.n_all, *a.n_all};
  const DatasetManifest m = GenDataset(a.spec, counts, a.out);
  out << "wrote " << m.entries.size() << " stacks and "
      << (fs::path(a.out) / "manifest.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"moddyn: modulation dynamics of layer-stacked speech "
               "representations for deepfake detection"};
  app.name(args.empty() ? "moddyn" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  auto add_seed = [&seed](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
  };

  TransformArgs transform;
  auto* cmd_transform =
      app.add_subcommand("transform", "write per-utterance modulation matrices");
  cmd_transform->add_option("--manifest", transform.manifest)->required();
  cmd_transform->add_option("--split", transform.split)
      ->check(CLI::IsMember({"all", "train", "valid", "eval"}));
  cmd_transform->add_option("--out", transform.out, "output directory")->required();
  cmd_transform->add_option("--checkpoint", transform.checkpoint,
                            "take layer weights and MTB settings from a checkpoint");
  transform.mtb.Add(cmd_transform);
  add_seed(cmd_transform);

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "train a raw or proposed model");
  cmd_train->add_option("--manifest", train.manifest)->required();
  cmd_train->add_option("--variant", train.variant)
      ->check(CLI::IsMember({"raw", "proposed"}));
  cmd_train->add_option("--out", train.out, "checkpoint path")->required();
  cmd_train->add_option("--hidden", train.cfg.hidden)->check(CLI::PositiveNumber);
  cmd_train->add_option("--epochs", train.cfg.max_epochs)->check(CLI::PositiveNumber);
  cmd_train->add_option("--patience", train.cfg.patience)->check(CLI::PositiveNumber);
  cmd_train->add_option("--w-genuine", train.cfg.w_genuine)->check(CLI::PositiveNumber);
  cmd_train->add_option("--lr-start", train.cfg.lr_start)->check(CLI::PositiveNumber);
  cmd_train->add_option("--lr-end", train.cfg.lr_end)->check(CLI::PositiveNumber);
  cmd_train->add_option("--dropout", train.cfg.dropout_p)->check(CLI::Range(0.0, 0.999));
  cmd_train->add_option("--optimizer", train.optimizer)
      ->check(CLI::IsMember({"adam", "sgd"}));
  cmd_train->add_option("--stop-rule", train.stop_rule,
                        "compare validation EER with the running best or the "
                        "previous epoch")
      ->check(CLI::IsMember({"best", "previous"}));
  train.mtb.Add(cmd_train);
  add_seed(cmd_train);

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "score a split and report EER and F1");
  cmd_eval->add_option("--checkpoint", eval.checkpoint)->required();
  cmd_eval->add_option("--manifest", eval.manifest)->required();
  cmd_eval->add_option("--split", eval.split)
      ->check(CLI::IsMember({"train", "valid", "eval"}));
  cmd_eval->add_option("--variant", eval.variant, "fail unless the checkpoint has this variant")
      ->check(CLI::IsMember({"raw", "proposed"}));
  cmd_eval->add_option("--out", eval.out, "scores file");
  cmd_eval->add_option("--f1-positive", eval.f1_positive)
      ->check(CLI::IsMember({"bonafide", "spoof"}));
  cmd_eval->add_option("--threshold", eval.threshold, "F1 decision threshold");
  add_seed(cmd_eval);

  CompareArgs compare;
  auto* cmd_compare =
      app.add_subcommand("compare", "HTER significance test between two score files");
  cmd_compare->add_option("scores_a", compare.scores_a)->required();
  cmd_compare->add_option("scores_b", compare.scores_b)->required();
  cmd_compare->add_option("--threshold-a", compare.threshold_a);
  cmd_compare->add_option("--threshold-b", compare.threshold_b);
  add_seed(cmd_compare);

  VisualizeArgs visualize;
  auto* cmd_visualize = app.add_subcommand(
      "visualize", "feature-averaged modulation patterns minus a reference");
  cmd_visualize->add_option("stacks", visualize.stacks)->required();
  cmd_visualize->add_option("--reference", visualize.reference)->required();
  cmd_visualize->add_option("--checkpoint", visualize.checkpoint);
  cmd_visualize->add_option("--out", visualize.out, "output file (default stdout)");
  visualize.mtb.Add(cmd_visualize);
  add_seed(cmd_visualize);

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  cmd_synth->add_option("--out", synth.out, "output directory")->required();
  cmd_synth->add_option("--n-train", synth.n_train, "stacks per class");
  cmd_synth->add_option("--n-valid", synth.n_valid, "stacks per class");
  cmd_synth->add_option("--n-eval", synth.n_eval, "stacks per class");
  cmd_synth->add_option("--n", synth.n_all, "stacks per class in every split");
  cmd_synth->add_option("--layers", synth.spec.layers)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--features", synth.spec.features)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--frames", synth.spec.frames)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--frame-rate", synth.spec.frame_rate)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--mod-freq", synth.spec.mod_freq);
  cmd_synth->add_option("--mod-depth", synth.spec.mod_depth);
  cmd_synth->add_option("--affected-fraction", synth.spec.affected_fraction);
  cmd_synth->add_option("--noise-std", synth.spec.noise_std);
  cmd_synth->add_option("--mean-scale", synth.spec.mean_scale);
  cmd_synth->add_option("--profile-seed", synth.spec.profile_seed);
  add_seed(cmd_synth);

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  if (argv.empty()) argv.push_back("moddyn");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_transform) return RunTransform(transform, out, err);
    if (*cmd_train) {
      train.cfg.seed = seed;
      return RunTrain(train, out, err);
    }
    if (*cmd_eval) return RunEval(eval, out, err);
    if (*cmd_compare) return RunCompare(compare, out, err);
    if (*cmd_visualize) return RunVisualize(visualize, out, err);
    if (*cmd_synth) {
      synth.spec.seed = seed;
      return RunSynth(synth, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace moddyn::cli
