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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "moddyn/error.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/repstack.hpp"
#include "moddyn/scores.hpp"
#include "oracles.hpp"

namespace moddyn {
namespace {

using testing::RandomStack;
using testing::TempDir;

std::vector<std::uint8_t> Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Dump(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no moddyn::Error thrown";
  return ErrorCode::kIo;
}

std::uint32_t U32At(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

float F32At(const std::vector<std::uint8_t>& b, std::size_t off) {
  const std::uint32_t bits = U32At(b, off);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

TEST(RepStackFile, SingleZeroValueLayout) {
  TempDir dir("rs");
  RepresentationStack s(1, 1, 1, 50.0f);
  WriteStack(s, dir / "a.repstk");
  const auto bytes = Slurp(dir / "a.repstk");
  ASSERT_EQ(bytes.size(), 36u);
  EXPECT_EQ(std::memcmp(bytes.data(), "REPSTK1\0", 8), 0);
  EXPECT_EQ(U32At(bytes, 8), 1u);
  EXPECT_EQ(U32At(bytes, 12), 1u);
  EXPECT_EQ(U32At(bytes, 16), 1u);
  EXPECT_EQ(F32At(bytes, 20), 50.0f);
  for (std::size_t i = 24; i < 36; ++i) EXPECT_EQ(bytes[i], 0) << i;
  EXPECT_EQ(ReadStack(dir / "a.repstk"), s);
}

TEST(RepStackFile, PayloadOffsetsFollowLayerFeatureTimeOrder) {
  RepresentationStack s(2, 3, 4, 50.0f);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t f = 0; f < 3; ++f)
      for (std::size_t t = 0; t < 4; ++t)
        s.at(l, f, t) = static_cast<float>(100 * l + 10 * f + t);
  const auto bytes = EncodeStack(s);
  ASSERT_EQ(bytes.size(), StackFileSize(2, 3, 4));
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t f = 0; f < 3; ++f)
      for (std::size_t t = 0; t < 4; ++t)
        EXPECT_EQ(F32At(bytes, 32 + 4 * ((l * 3 + f) * 4 + t)),
                  static_cast<float>(100 * l + 10 * f + t));
}

TEST(RepStackFile, RandomRoundTripIsBitExact) {
  TempDir dir("rs");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto s = RandomStack(rng, 3, 4, 10);
    const auto path = dir / ("s" + std::to_string(i) + ".repstk");
    WriteStack(s, path);
    EXPECT_EQ(ReadStack(path), s);
    EXPECT_EQ(std::filesystem::file_size(path), StackFileSize(3, 4, 10));
  }
}

TEST(RepStackFile, ExtremeFloatsRoundTrip) {
  RepresentationStack s(1, 1, 4, 16000.0f);
  s.at(0, 0, 0) = std::numeric_limits<float>::denorm_min();
  s.at(0, 0, 1) = -0.0f;
  s.at(0, 0, 2) = std::numeric_limits<float>::max();
  s.at(0, 0, 3) = std::numeric_limits<float>::lowest();
  const auto back = DecodeStack(EncodeStack(s));
  EXPECT_EQ(back, s);
  EXPECT_TRUE(std::signbit(back.at(0, 0, 1)));
}

TEST(RepStackFile, NanIsRejectedWithoutCreatingFile) {
  TempDir dir("rs");
  RepresentationStack s(1, 2, 3, 50.0f);
  s.at(0, 1, 2) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(CodeOf([&] { WriteStack(s, dir / "nan.repstk"); }),
            ErrorCode::kValidation);
  EXPECT_FALSE(std::filesystem::exists(dir / "nan.repstk"));
  s.at(0, 1, 2) = std::numeric_limits<float>::infinity();
  EXPECT_EQ(CodeOf([&] { WriteStack(s, dir / "inf.repstk"); }),
            ErrorCode::kValidation);
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}

TEST(RepStackFile, InvalidDimensionsAndRate) {
  EXPECT_EQ(CodeOf([] { RepresentationStack(0, 1, 1, 50.0f).Validate(); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { RepresentationStack(1, 1, 1, 0.0f).Validate(); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { RepresentationStack(1, 1, 1, -5.0f).Validate(); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] {
              RepresentationStack(1, 2, 3, 50.0f, std::vector<float>(5));
            }),
            ErrorCode::kDimension);
}

TEST(RepStackFile, WrongMagicIsFormatError) {
  TempDir dir("rs");
  auto bytes = EncodeStack(RepresentationStack(1, 1, 2, 50.0f));
  bytes[3] = 'X';
  Dump(dir / "bad.repstk", bytes);
  EXPECT_EQ(CodeOf([&] { ReadStack(dir / "bad.repstk"); }), ErrorCode::kFormat);
  Dump(dir / "tiny.repstk", {'R', 'E'});
  EXPECT_EQ(CodeOf([&] { ReadStack(dir / "tiny.repstk"); }), ErrorCode::kFormat);
}

TEST(RepStackFile, TruncationIsCorruptionError) {
  TempDir dir("rs");
  std::mt19937_64 rng(3);
  auto bytes = EncodeStack(RandomStack(rng, 3, 4, 10));
  bytes.resize(bytes.size() - 4);
  Dump(dir / "trunc.repstk", bytes);
  EXPECT_EQ(CodeOf([&] { ReadStack(dir / "trunc.repstk"); }),
            ErrorCode::kCorruption);
  bytes.resize(20);
  Dump(dir / "hdr.repstk", bytes);
  EXPECT_EQ(CodeOf([&] { ReadStack(dir / "hdr.repstk"); }),
            ErrorCode::kCorruption);
}

TEST(RepStackFile, TrailingBytesAndReservedAreCorruption) {
  auto bytes = EncodeStack(RepresentationStack(1, 1, 2, 50.0f));
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_EQ(CodeOf([&] { DecodeStack(longer); }), ErrorCode::kCorruption);
  auto reserved = bytes;
  reserved[27] = 1;
  EXPECT_EQ(CodeOf([&] { DecodeStack(reserved); }), ErrorCode::kCorruption);
}

TEST(RepStackFile, NanPayloadOnDiskIsRejected) {
  auto bytes = EncodeStack(RepresentationStack(1, 1, 1, 50.0f));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 32, &nan, 4);
  EXPECT_EQ(CodeOf([&] { DecodeStack(bytes); }), ErrorCode::kValidation);
}

TEST(RepStackFile, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { ReadStack("/nonexistent/dir/x.repstk"); }),
            ErrorCode::kIo);
}

TEST(RepStackProperty, SizeIsHeaderPlusPayload) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> d(1, 9);
  for (int i = 0; i < 50; ++i) {
    const std::size_t l = d(rng), f = d(rng), t = d(rng);
    const auto s = RandomStack(rng, l, f, t);
    EXPECT_EQ(EncodeStack(s).size(), kStackHeaderBytes + 4 * l * f * t);
    EXPECT_EQ(DecodeStack(EncodeStack(s)), s);
  }
}

TEST(Manifest, TwoRows) {
  const auto m = ParseManifest(
      "id,path,label,attack_id,split\n"
      "u1,a.repstk,bonafide,-,train\n"
      "u2,sub/b.repstk,spoof,A07,train\n",
      "/data");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].id, "u1");
  EXPECT_EQ(m.entries[0].label, Label::kBonafide);
  EXPECT_EQ(m.entries[1].label, Label::kSpoof);
  EXPECT_EQ(m.entries[1].attack_id, "A07");
  EXPECT_EQ(m.entries[1].split, Split::kTrain);
  EXPECT_EQ(m.Resolve(m.entries[1]), std::filesystem::path("/data/sub/b.repstk"));
  EXPECT_EQ(m.Select(Split::kTrain).size(), 2u);
  EXPECT_TRUE(m.Select(Split::kEval).empty());
}

TEST(Manifest, UnknownLabelNamesLine) {
  try {
    ParseManifest(
        "id,path,label,attack_id,split\n"
        "u1,a.repstk,bonafide,-,train\n"
        "u2,b.repstk,genuine,-,train\n",
        ".");
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("genuine"), std::string::npos) << e.what();
  }
}

TEST(Manifest, UnknownSplitAndShortRows) {
  EXPECT_EQ(CodeOf([] {
              ParseManifest("id,path,label,attack_id,split\nu1,a,spoof,-,dev\n", ".");
            }),
            ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] {
              ParseManifest("id,path,label,attack_id,split\nu1,a,spoof\n", ".");
            }),
            ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseManifest("id,file,label\n", "."); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseManifest("", "."); }), ErrorCode::kParse);
}

TEST(Manifest, DuplicateId) {
  EXPECT_EQ(CodeOf([] {
              ParseManifest(
                  "id,path,label,attack_id,split\n"
                  "u1,a,bonafide,-,train\n"
                  "u1,b,spoof,-,eval\n",
                  ".");
            }),
            ErrorCode::kDuplicateId);
}

TEST(Manifest, CrlfAndTrailingBlankLinesAccepted) {
  const auto m = ParseManifest(
      "id,path,label,attack_id,split\r\nu1,a,bonafide,-,valid\r\n\r\n", ".");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].path, std::filesystem::path("a"));
  EXPECT_EQ(m.entries[0].split, Split::kValid);
}

TEST(Manifest, WriteReadRoundTripAndPathValidation) {
  TempDir dir("mf");
  DatasetManifest m;
  m.entries.push_back({"u1", "a.repstk", Label::kBonafide, "-", Split::kTrain});
  m.entries.push_back({"u2", "b.repstk", Label::kSpoof, "AM", Split::kEval});
  WriteManifest(m, dir / "manifest.csv");
  const auto back = ReadManifest(dir / "manifest.csv");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.base_dir, dir.path());
  EXPECT_EQ(back.entries[1].attack_id, "AM");
  EXPECT_EQ(back.entries[1].split, Split::kEval);

  WriteStack(RepresentationStack(1, 1, 1, 50.0f), dir / "a.repstk");
  try {
    ValidateManifestPaths(back);
    FAIL() << "expected missing file";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("u2"), std::string::npos);
  }
  WriteStack(RepresentationStack(1, 1, 1, 50.0f), dir / "b.repstk");
  EXPECT_NO_THROW(ValidateManifestPaths(back));
}

TEST(Scores, SingleRow) {
  const auto s = ParseScores("id,score,label\nu1,0.73,bonafide\n");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.items[0].id, "u1");
  EXPECT_EQ(s.items[0].score, 0.73);
  EXPECT_EQ(s.items[0].label, Label::kBonafide);
}

TEST(Scores, OutOfRangeAndMalformed) {
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,1.5,spoof\n"); }),
            ErrorCode::kRange);
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,0,spoof\n"); }),
            ErrorCode::kRange);
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,1,spoof\n"); }),
            ErrorCode::kRange);
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,nan,spoof\n"); }),
            ErrorCode::kRange);
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,abc,spoof\n"); }),
            ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseScores("id,score,label\nu1,0.5,human\n"); }),
            ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] {
              ParseScores("id,score,label\nu1,0.5,spoof\nu1,0.6,spoof\n");
            }),
            ErrorCode::kDuplicateId);
}

TEST(Scores, RandomRoundTrip) {
  TempDir dir("sc");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
  ScoreSet s;
  for (int i = 0; i < 100; ++i) {
    s.items.push_back({"id" + std::to_string(i), u(rng),
                       i % 3 == 0 ? Label::kBonafide : Label::kSpoof});
  }
  WriteScores(s, dir / "scores.csv");
  const auto back = ReadScores(dir / "scores.csv");
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.items[i].id, s.items[i].id);
    EXPECT_EQ(back.items[i].score, s.items[i].score);
    EXPECT_EQ(back.items[i].label, s.items[i].label);
  }
  EXPECT_EQ(back.Count(Label::kBonafide), 34u);
  EXPECT_EQ(FormatScores(back), FormatScores(s));
}

TEST(Scores, WriteRejectsInvalidSet) {
  TempDir dir("sc");
  ScoreSet s;
  s.items.push_back({"a", 0.0, Label::kSpoof});
  EXPECT_EQ(CodeOf([&] { WriteScores(s, dir / "x.csv"); }), ErrorCode::kRange);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.csv"));
}

}  // namespace
}  // namespace moddyn
