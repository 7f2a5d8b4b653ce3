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

#ifndef MODDYN_SYNTHGEN_HPP_
#define MODDYN_SYNTHGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "moddyn/manifest.hpp"
#include "moddyn/repstack.hpp"

namespace moddyn {

/// Synthetic stacks: per-channel Gaussian noise around a random channel mean.
/// The modulated class multiplies the first ceil(affected_fraction * F)
/// channels by 1 + depth * sin(2 pi mod_freq t / frame_rate + phase), a
/// zero-mean amplitude modulation that leaves time averages unchanged in
/// expectation.
struct SynthSpec {
  std::size_t layers = 3;
  std::size_t features = 32;
  std::size_t frames = 250;
  double frame_rate = 50.0;
  double mod_freq = 25.0 / 3.0;  // 8.33 Hz, bin 1 of a 6-frame window at 50 Hz
  double mod_depth = 0.5;
  double affected_fraction = 0.25;
  double noise_std = 1.0;
  // Channel means have magnitude uniform in [0.5, 1.5] * mean_scale and a
  // random sign. They are drawn from `profile_seed`, shared by every stack of
  // a dataset; noise and modulation phases are drawn from `seed`.
  double mean_scale = 2.0;
  std::uint64_t profile_seed = 0;
  std::uint64_t seed = 0;

  /// Throws Error(kValidation).
  void Validate() const;
  std::size_t AffectedChannels() const;
};

enum class SynthClass { kClean, kModulated };

/// Deterministic in (spec, class). Clean and modulated stacks drawn with the
/// same seeds share their noise, means and phases exactly.
RepresentationStack GenStack(const SynthSpec& spec, SynthClass cls);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t eval = 0;
};

/// Writes one REPSTK1 file per stack, `manifest.csv` and `synth_spec.json`
/// into `out_dir`. Clean stacks are bonafide, modulated ones spoof. Counts are
/// per class.
DatasetManifest GenDataset(const SynthSpec& spec, const SplitCounts& per_class,
                           const std::filesystem::path& out_dir);
DatasetManifest GenDataset(const SynthSpec& spec, std::size_t per_class_per_split,
                           const std::filesystem::path& out_dir);

/// Seed of stack `index` of a given split and class.
std::uint64_t DeriveSeed(std::uint64_t base, Split split, SynthClass cls,
                         std::size_t index);

std::string SerializeSynthSpec(const SynthSpec& spec);

}  // namespace moddyn

#endif  // MODDYN_SYNTHGEN_HPP_
