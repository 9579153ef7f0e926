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

#ifndef CGATE_VIDEO_H_
#define CGATE_VIDEO_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cgate {

constexpr int kBlockSize = 16;

// One 8-bit sample plane stored row-major without stride padding.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, uint8_t fill = 0)
      : width_(width),
        height_(height),
        samples_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return samples_.empty(); }

  uint8_t at(int x, int y) const {
    return samples_[static_cast<size_t>(y) * width_ + x];
  }
  uint8_t& at(int x, int y) {
    return samples_[static_cast<size_t>(y) * width_ + x];
  }
  // Out-of-plane coordinates replicate the nearest edge sample.
  uint8_t Clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }
  const uint8_t* Row(int y) const {
    return samples_.data() + static_cast<size_t>(y) * width_;
  }
  uint8_t* Row(int y) { return samples_.data() + static_cast<size_t>(y) * width_; }

  const std::vector<uint8_t>& samples() const { return samples_; }

  bool operator==(const Plane& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> samples_;
};

// Luma is stored padded to the 16x16 block grid; chroma keeps its logical
// 4:2:0 size and is never coded.
struct Frame {
  Plane luma;
  Plane cb;
  Plane cr;

  bool operator==(const Frame& other) const = default;
};

struct FrameRate {
  int num = 30;
  int den = 1;

  double fps() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate& other) const = default;
};

struct VideoClip {
  int width = 0;   // logical
  int height = 0;  // logical
  int padded_width = 0;
  int padded_height = 0;
  FrameRate frame_rate;
  std::vector<Frame> frames;

  bool operator==(const VideoClip& other) const = default;
};

int PadToBlockGrid(int size);
int ChromaSize(int luma_size);

// Replicates the right column and bottom row of |logical| out to the padded
// size.
Plane PadPlane(const Plane& logical, int padded_width, int padded_height);

// Builds a clip from logical-size planes, padding luma. Throws on any
// invariant violation.
VideoClip MakeClip(int width, int height, FrameRate rate,
                   std::vector<Frame> logical_frames);

// Throws cgate::Error describing the first violated clip invariant.
void ValidateClip(const VideoClip& clip);

// Y4M 4:2:0 8-bit. Errors carry the byte offset of the offending data.
VideoClip ParseY4m(std::string_view bytes,
                   std::optional<int> max_frames = std::nullopt);
VideoClip ReadY4m(const std::string& path,
                  std::optional<int> max_frames = std::nullopt);
std::string SerializeY4m(const VideoClip& clip);
void WriteY4m(const VideoClip& clip, const std::string& path);

// Headerless planar I420.
VideoClip ReadRawI420(const std::string& path, int width, int height,
                      FrameRate rate,
                      std::optional<int> max_frames = std::nullopt);

enum class SyntheticKind { kGlobalPan, kTwoLayerParallax, kNoise, kStatic };

std::optional<SyntheticKind> SyntheticKindFromName(std::string_view name);
const char* SyntheticKindName(SyntheticKind kind);

struct Velocity {
  int dx = 0;
  int dy = 0;
};

struct SyntheticMotion {
  Velocity pan{2, 0};
  Velocity background{1, 0};
  Velocity foreground{-2, 1};
};

// Deterministic test content. Frame t of a pan equals frame 0 shifted by
// t * velocity, so the content motion between consecutive frames is exactly
// the velocity.
VideoClip GenSynthetic(SyntheticKind kind, int width, int height, int frames,
                       uint64_t seed, const SyntheticMotion& motion = {});

}  // namespace cgate

#endif  // CGATE_VIDEO_H_
