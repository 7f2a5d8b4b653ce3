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

#include "moddyn/repstack.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "file_util.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'P', 'S', 'T', 'K', '1', '\0'};

void PutU32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t GetU32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

void PutF32(std::uint8_t* out, float v) {
  PutU32(out, std::bit_cast<std::uint32_t>(v));
}

float GetF32(const std::uint8_t* in) {
  return std::bit_cast<float>(GetU32(in));
}

}  // namespace

RepresentationStack::RepresentationStack(std::size_t layers,
                                         std::size_t features,
                                         std::size_t frames, float frame_rate)
    : layers_(layers),
      features_(features),
      frames_(frames),
      frame_rate_(frame_rate),
      data_(layers * features * frames, 0.0f) {}

RepresentationStack::RepresentationStack(std::size_t layers,
                                         std::size_t features,
                                         std::size_t frames, float frame_rate,
                                         std::vector<float> data)
    : layers_(layers),
      features_(features),
      frames_(frames),
      frame_rate_(frame_rate),
      data_(std::move(data)) {
  if (data_.size() != layers * features * frames) {
    throw Error(ErrorCode::kDimension,
                "stack payload has " + std::to_string(data_.size()) +
                    " values, expected " +
                    std::to_string(layers * features * frames));
  }
}

void RepresentationStack::Validate() const {
  if (layers_ == 0 || features_ == 0 || frames_ == 0) {
    throw Error(ErrorCode::kValidation, "stack dimensions must be >= 1");
  }
  if (layers_ > std::numeric_limits<std::uint32_t>::max() ||
      features_ > std::numeric_limits<std::uint32_t>::max() ||
      frames_ > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kValidation, "stack dimension exceeds 32 bits");
  }
  if (!(frame_rate_ > 0.0f) || !std::isfinite(frame_rate_)) {
    throw Error(ErrorCode::kValidation, "frame rate must be positive");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCode::kValidation,
                  "non-finite value at flat index " + std::to_string(i));
    }
  }
}

bool operator==(const RepresentationStack& a, const RepresentationStack& b) {
  return a.layers_ == b.layers_ && a.features_ == b.features_ &&
         a.frames_ == b.frames_ &&
         std::bit_cast<std::uint32_t>(a.frame_rate_) ==
             std::bit_cast<std::uint32_t>(b.frame_rate_) &&
         std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(float)) == 0;
}

std::uint64_t StackFileSize(std::uint64_t layers, std::uint64_t features,
                            std::uint64_t frames) {
  return kStackHeaderBytes + 4 * layers * features * frames;
}

std::vector<std::uint8_t> EncodeStack(const RepresentationStack& stack) {
  std::vector<std::uint8_t> bytes(
      StackFileSize(stack.layers(), stack.features(), stack.frames()), 0);
  std::memcpy(bytes.data(), kMagic, sizeof(kMagic));
  PutU32(&bytes[8], static_cast<std::uint32_t>(stack.layers()));
  PutU32(&bytes[12], static_cast<std::uint32_t>(stack.features()));
  PutU32(&bytes[16], static_cast<std::uint32_t>(stack.frames()));
  PutF32(&bytes[20], stack.frame_rate());
  // bytes 24..31 stay zero (reserved)
  std::uint8_t* out = bytes.data() + kStackHeaderBytes;
  for (float v : stack.data()) {
    PutF32(out, v);
    out += 4;
  }
  return bytes;
}

RepresentationStack DecodeStack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormat, "not a REPSTK1 file (bad magic)");
  }
  if (bytes.size() < kStackHeaderBytes) {
    throw Error(ErrorCode::kCorruption, "REPSTK1 header truncated");
  }
  const std::uint32_t layers = GetU32(&bytes[8]);
  const std::uint32_t features = GetU32(&bytes[12]);
  const std::uint32_t frames = GetU32(&bytes[16]);
  const float frame_rate = GetF32(&bytes[20]);
  for (std::size_t i = 24; i < kStackHeaderBytes; ++i) {
    if (bytes[i] != 0) {
      throw Error(ErrorCode::kCorruption, "REPSTK1 reserved bytes not zero");
    }
  }
  const std::uint64_t expected = StackFileSize(layers, features, frames);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kCorruption,
                "REPSTK1 size mismatch: header declares " +
                    std::to_string(expected) + " bytes, file has " +
                    std::to_string(bytes.size()));
  }
  std::vector<float> data(static_cast<std::size_t>(layers) * features * frames);
  const std::uint8_t* in = bytes.data() + kStackHeaderBytes;
  for (float& v : data) {
    v = GetF32(in);
    in += 4;
  }
  RepresentationStack stack(layers, features, frames, frame_rate,
                            std::move(data));
  stack.Validate();
  return stack;
}

void WriteStack(const RepresentationStack& stack,
                const std::filesystem::path& path) {
  stack.Validate();
  internal::AtomicWriteFile(path, EncodeStack(stack));
}

RepresentationStack ReadStack(const std::filesystem::path& path) {
  return DecodeStack(internal::ReadBinaryFile(path));
}

}  // namespace moddyn
