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

#ifndef MODDYN_REPSTACK_HPP_
#define MODDYN_REPSTACK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace moddyn {

/// Layer-stacked encoder output: layers x features x time, stored
/// layer-major / feature-major / time-minor as 32-bit floats so that the
/// in-memory payload is exactly the REPSTK1 payload.
class RepresentationStack {
 public:
  RepresentationStack() = default;
  /// Zero-filled stack.
  RepresentationStack(std::size_t layers, std::size_t features,
                      std::size_t frames, float frame_rate);
  /// Takes ownership of `data`; its size must equal layers*features*frames.
  RepresentationStack(std::size_t layers, std::size_t features,
                      std::size_t frames, float frame_rate,
                      std::vector<float> data);

  std::size_t layers() const { return layers_; }
  std::size_t features() const { return features_; }
  std::size_t frames() const { return frames_; }
  float frame_rate() const { return frame_rate_; }

  float& at(std::size_t l, std::size_t f, std::size_t t) {
    return data_[Offset(l, f, t)];
  }
  float at(std::size_t l, std::size_t f, std::size_t t) const {
    return data_[Offset(l, f, t)];
  }

  /// Contiguous time trajectory of one (layer, feature) channel.
  std::span<const float> channel(std::size_t l, std::size_t f) const {
    return {data_.data() + Offset(l, f, 0), frames_};
  }
  std::span<float> channel(std::size_t l, std::size_t f) {
    return {data_.data() + Offset(l, f, 0), frames_};
  }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  /// Throws Error(kValidation) when a dimension is zero, the frame rate is
  /// not positive and finite, or any value is NaN/Inf.
  void Validate() const;

  /// Dimensions, frame rate and payload compared bit for bit.
  friend bool operator==(const RepresentationStack& a,
                         const RepresentationStack& b);

 private:
  std::size_t Offset(std::size_t l, std::size_t f, std::size_t t) const {
    return (l * features_ + f) * frames_ + t;
  }

  std::size_t layers_ = 0;
  std::size_t features_ = 0;
  std::size_t frames_ = 0;
  float frame_rate_ = 0.0f;
  std::vector<float> data_;
};

inline constexpr std::size_t kStackHeaderBytes = 32;

/// Size in bytes of a REPSTK1 file holding the given dimensions.
std::uint64_t StackFileSize(std::uint64_t layers, std::uint64_t features,
                            std::uint64_t frames);

/// Writes `stack` in REPSTK1 layout. The stack is validated before the file is
/// touched; the file is written to a sibling temporary and renamed.
void WriteStack(const RepresentationStack& stack,
                const std::filesystem::path& path);

RepresentationStack ReadStack(const std::filesystem::path& path);

/// Serializes to an in-memory REPSTK1 image (no validation).
std::vector<std::uint8_t> EncodeStack(const RepresentationStack& stack);
RepresentationStack DecodeStack(std::span<const std::uint8_t> bytes);

}  // namespace moddyn

#endif  // MODDYN_REPSTACK_HPP_
