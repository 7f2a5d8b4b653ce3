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

#include "moddyn/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include <json.hpp>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SynthSpec::Validate() const {
  if (layers == 0 || features == 0 || frames == 0) {
    throw Error(ErrorCode::kValidation, "synth dimensions must be >= 1");
  }
  if (!(frame_rate > 0.0)) {
    throw Error(ErrorCode::kValidation, "synth frame rate must be positive");
  }
  if (!(mod_freq > 0.0 && mod_freq < frame_rate / 2.0)) {
    throw Error(ErrorCode::kValidation, "mod_freq must be in (0, frame_rate/2)");
  }
  if (!(mod_depth >= 0.0)) {
    throw Error(ErrorCode::kValidation, "mod_depth must be >= 0");
  }
  if (!(affected_fraction >= 0.0 && affected_fraction <= 1.0)) {
    throw Error(ErrorCode::kValidation, "affected_fraction must be in [0,1]");
  }
  if (!(noise_std > 0.0)) {
    throw Error(ErrorCode::kValidation, "noise_std must be positive");
  }
  if (!(mean_scale >= 0.0)) {
    throw Error(ErrorCode::kValidation, "mean_scale must be >= 0");
  }
}

std::size_t SynthSpec::AffectedChannels() const {
  return static_cast<std::size_t>(
      std::ceil(affected_fraction * static_cast<double>(features) - 1e-9));
}

RepresentationStack GenStack(const SynthSpec& spec, SynthClass cls) {
  spec.Validate();
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::bernoulli_distribution negative(0.5);
  std::normal_distribution<double> noise(0.0, spec.noise_std);

  std::vector<double> means(spec.features);
  std::mt19937_64 profile_rng(spec.profile_seed);
  for (double& m : means) {
    m = (negative(profile_rng) ? -1.0 : 1.0) * magnitude(profile_rng) *
        spec.mean_scale;
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<double> phases(spec.features);
  for (double& phase : phases) phase = phase_dist(rng);

  const std::size_t affected =
      cls == SynthClass::kModulated ? spec.AffectedChannels() : 0;
  const double omega = 2.0 * std::numbers::pi * spec.mod_freq / spec.frame_rate;
  RepresentationStack stack(spec.layers, spec.features, spec.frames,
                            static_cast<float>(spec.frame_rate));
  for (std::size_t l = 0; l < spec.layers; ++l) {
    for (std::size_t f = 0; f < spec.features; ++f) {
      auto ch = stack.channel(l, f);
      for (std::size_t t = 0; t < spec.frames; ++t) {
        // Draw unconditionally so both classes consume the generator alike.
        double v = means[f] + noise(rng);
        if (f < affected) {
          v *= 1.0 + spec.mod_depth *
                         std::sin(omega * static_cast<double>(t) + phases[f]);
        }
        ch[t] = static_cast<float>(v);
      }
    }
  }
  return stack;
}

std::uint64_t DeriveSeed(std::uint64_t base, Split split, SynthClass cls,
                         std::size_t index) {
  std::uint64_t s = SplitMix64(base);
  s = SplitMix64(s ^ static_cast<std::uint64_t>(split));
  s = SplitMix64(s ^ (static_cast<std::uint64_t>(cls) + 0x100));
  return SplitMix64(s ^ static_cast<std::uint64_t>(index));
}

std::string SerializeSynthSpec(const SynthSpec& spec) {
  nlohmann::json j = {{"layers", spec.layers},
                      {"features", spec.features},
                      {"frames", spec.frames},
                      {"frame_rate", spec.frame_rate},
                      {"mod_freq", spec.mod_freq},
                      {"mod_depth", spec.mod_depth},
                      {"affected_fraction", spec.affected_fraction},
                      {"noise_std", spec.noise_std},
                      {"mean_scale", spec.mean_scale},
                      {"profile_seed", spec.profile_seed},
                      {"seed", spec.seed}};
  return j.dump(1) + "\n";
}

DatasetManifest GenDataset(const SynthSpec& spec, const SplitCounts& per_class,
                           const std::filesystem::path& out_dir) {
  spec.Validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + out_dir.string());
  }
  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  const std::pair<Split, std::size_t> splits[] = {
      {Split::kTrain, per_class.train},
      {Split::kValid, per_class.valid},
      {Split::kEval, per_class.eval}};
  for (const auto& [split, count] : splits) {
    for (SynthClass cls : {SynthClass::kClean, SynthClass::kModulated}) {
      const Label label =
          cls == SynthClass::kClean ? Label::kBonafide : Label::kSpoof;
      for (std::size_t i = 0; i < count; ++i) {
        SynthSpec s = spec;
        s.seed = DeriveSeed(spec.seed, split, cls, i);
        char id[64];
        std::snprintf(id, sizeof(id), "%s_%s_%04zu",
                      std::string(SplitName(split)).c_str(),
                      std::string(LabelName(label)).c_str(), i);
        const std::string file = std::string(id) + ".repstk";
        WriteStack(GenStack(s, cls), out_dir / file);
        manifest.entries.push_back(
            {id, file, label, label == Label::kBonafide ? "-" : "AM", split});
      }
    }
  }
  WriteManifest(manifest, out_dir / "manifest.csv");
  internal::AtomicWriteFile(out_dir / "synth_spec.json",
                            std::string_view(SerializeSynthSpec(spec)));
  return manifest;
}

DatasetManifest GenDataset(const SynthSpec& spec, std::size_t per_class_per_split,
                           const std::filesystem::path& out_dir) {
  return GenDataset(
      spec, SplitCounts{per_class_per_split, per_class_per_split, per_class_per_split},
      out_dir);
}

}  // namespace moddyn
