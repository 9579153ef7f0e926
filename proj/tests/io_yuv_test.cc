// Copyright 2026 The cgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <string>

#include "cgate/util.h"
#include "cgate/video.h"
#include "test_support.h"

namespace cgate {
namespace {

std::string Y4mBytes(int w, int h, int frames, const std::string& colour) {
  std::string out = StrFormat("YUV4MPEG2 W%d H%d F30:1 %s\n", w, h,
                              colour.c_str());
  const size_t payload = static_cast<size_t>(w) * h +
                         2 * static_cast<size_t>(ChromaSize(w)) * ChromaSize(h);
  for (int f = 0; f < frames; ++f) {
    out += "FRAME\n";
    for (size_t i = 0; i < payload; ++i) {
      out.push_back(static_cast<char>((i * 7 + f * 13) & 0xff));
    }
  }
  return out;
}

TEST(Y4mTest, ParsesHeader) {
  const VideoClip clip = ParseY4m(Y4mBytes(64, 64, 2, "C420"));
  EXPECT_EQ(clip.width, 64);
  EXPECT_EQ(clip.height, 64);
  EXPECT_EQ(clip.frames.size(), 2u);
  EXPECT_EQ(clip.frame_rate.num, 30);
  EXPECT_EQ(clip.frame_rate.den, 1);
  EXPECT_DOUBLE_EQ(clip.frame_rate.fps(), 30.0);
}

TEST(Y4mTest, RejectsSingleFrame) {
  try {
    ParseY4m(Y4mBytes(64, 64, 1, "C420"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(">= 2 frames"), std::string::npos);
  }
}

TEST(Y4mTest, ErrorsNameByteOffset) {
  std::string bytes = Y4mBytes(64, 64, 2, "C420");
  bytes.resize(bytes.size() - 10);
  try {
    ParseY4m(bytes);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
  EXPECT_THROW(ParseY4m("YUV4MPEG2 W64 H64 F30:1 C444\n"), Error);
  EXPECT_THROW(ParseY4m("NOTY4M W64 H64\n"), Error);
  EXPECT_THROW(ParseY4m(""), Error);
}

TEST(Y4mTest, PadsOddSizeByEdgeReplication) {
  const VideoClip clip = ParseY4m(Y4mBytes(65, 65, 2, "C420jpeg"));
  EXPECT_EQ(clip.width, 65);
  EXPECT_EQ(clip.height, 65);
  EXPECT_EQ(clip.padded_width, 80);
  EXPECT_EQ(clip.padded_height, 80);
  const Plane& luma = clip.frames[0].luma;
  ASSERT_EQ(luma.width(), 80);
  ASSERT_EQ(luma.height(), 80);
  for (int y = 0; y < 80; ++y) {
    for (int x = 0; x < 80; ++x) {
      EXPECT_EQ(luma.at(x, y), luma.at(std::min(x, 64), std::min(y, 64)));
    }
  }
  const VideoClip again = ParseY4m(SerializeY4m(clip));
  EXPECT_EQ(again, clip);
  EXPECT_EQ(SerializeY4m(again), SerializeY4m(clip));
}

TEST(Y4mTest, FileSizeArithmetic) {
  const VideoClip clip = GenSynthetic(SyntheticKind::kNoise, 64, 64, 2, 5);
  const std::string bytes = SerializeY4m(clip);
  const std::string header = bytes.substr(0, bytes.find('\n') + 1);
  EXPECT_EQ(bytes.size(), header.size() + 2 * (6 + 64 * 64 * 3 / 2));
}

TEST(Y4mTest, EmptyClipIsRejected) {
  VideoClip clip;
  clip.width = clip.height = clip.padded_width = clip.padded_height = 64;
  EXPECT_THROW(SerializeY4m(clip), Error);
}

TEST(Y4mTest, FileRoundTrip) {
  testing::TempDir dir;
  const VideoClip clip =
      GenSynthetic(SyntheticKind::kTwoLayerParallax, 48, 40, 3, 9);
  WriteY4m(clip, dir.File("a.y4m"));
  EXPECT_EQ(ReadY4m(dir.File("a.y4m")), clip);
  EXPECT_EQ(ReadY4m(dir.File("a.y4m"), 2).frames.size(), 2u);
}

TEST(Y4mTest, RoundTripEveryKindAndSize) {
  for (const char* name : {"global_pan", "two_layer_parallax", "noise",
                           "static"}) {
    for (int size : {32, 33, 47, 64}) {
      const VideoClip clip =
          GenSynthetic(*SyntheticKindFromName(name), size, size + 3, 2, 3);
      EXPECT_EQ(ParseY4m(SerializeY4m(clip)), clip) << name << " " << size;
    }
  }
}

TEST(RawTest, ReadsI420) {
  testing::TempDir dir;
  const VideoClip clip = GenSynthetic(SyntheticKind::kNoise, 32, 32, 3, 4);
  std::string raw;
  const std::string y4m = SerializeY4m(clip);
  size_t pos = y4m.find('\n') + 1;
  while (pos < y4m.size()) {
    pos += 6;
    raw += y4m.substr(pos, 32 * 32 * 3 / 2);
    pos += 32 * 32 * 3 / 2;
  }
  WriteFile(dir.File("a.yuv"), raw);
  const VideoClip read = ReadRawI420(dir.File("a.yuv"), 32, 32, {30, 1});
  EXPECT_EQ(read, clip);
  WriteFile(dir.File("b.yuv"), raw.substr(0, raw.size() - 1));
  EXPECT_THROW(ReadRawI420(dir.File("b.yuv"), 32, 32, {30, 1}), Error);
}

TEST(PaddingTest, GridAndChroma) {
  EXPECT_EQ(PadToBlockGrid(1), 16);
  EXPECT_EQ(PadToBlockGrid(16), 16);
  EXPECT_EQ(PadToBlockGrid(17), 32);
  EXPECT_EQ(PadToBlockGrid(65), 80);
  EXPECT_EQ(ChromaSize(65), 33);
  EXPECT_EQ(ChromaSize(64), 32);
}

TEST(PaddingTest, NeverAltersLogicalSamples) {
  const Plane logical = testing::PlaneFrom(
      37, 21, [](int x, int y) { return testing::Hashed(x, y, 1); });
  const Plane padded = PadPlane(logical, 48, 32);
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 37; ++x) EXPECT_EQ(padded.at(x, y), logical.at(x, y));
  }
}

TEST(SyntheticTest, StaticFramesRepeat) {
  for (uint64_t seed : {1, 2, 99}) {
    const VideoClip clip = GenSynthetic(SyntheticKind::kStatic, 64, 48, 5, seed);
    for (const Frame& f : clip.frames) EXPECT_EQ(f, clip.frames[0]);
  }
}

TEST(SyntheticTest, PanShiftsColumns) {
  const VideoClip clip = GenSynthetic(SyntheticKind::kGlobalPan, 64, 64, 6, 3);
  for (int t = 1; t < 6; ++t) {
    const Plane& cur = clip.frames[t].luma;
    const Plane& first = clip.frames[0].luma;
    for (int y = 0; y < 64; ++y) {
      for (int x = 2 * t; x < 64; ++x) {
        ASSERT_EQ(cur.at(x, y), first.at(x - 2 * t, y)) << t << " " << x;
      }
    }
  }
}

TEST(SyntheticTest, Deterministic) {
  for (const char* name : {"global_pan", "two_layer_parallax", "noise",
                           "static"}) {
    const SyntheticKind kind = *SyntheticKindFromName(name);
    EXPECT_EQ(GenSynthetic(kind, 64, 64, 4, 17), GenSynthetic(kind, 64, 64, 4, 17));
    EXPECT_STREQ(SyntheticKindName(kind), name);
  }
  EXPECT_NE(GenSynthetic(SyntheticKind::kNoise, 64, 64, 2, 1),
            GenSynthetic(SyntheticKind::kNoise, 64, 64, 2, 2));
  EXPECT_FALSE(SyntheticKindFromName("zoom").has_value());
}

TEST(SyntheticTest, RejectsBadArguments) {
  EXPECT_THROW(GenSynthetic(SyntheticKind::kStatic, 64, 64, 1, 1), Error);
  EXPECT_THROW(GenSynthetic(SyntheticKind::kStatic, 16, 64, 4, 1), Error);
}

}  // namespace
}  // namespace cgate
