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

#include "cgate/video.h"

#include <cstring>
#include <utility>

#include "cgate/util.h"

namespace cgate {
namespace {

constexpr std::string_view kY4mSignature = "YUV4MPEG2";
constexpr std::string_view kFrameMarker = "FRAME";
constexpr int kGrain = 12;

size_t FramePayloadSize(int width, int height) {
  const size_t luma = static_cast<size_t>(width) * height;
  const size_t chroma =
      static_cast<size_t>(ChromaSize(width)) * ChromaSize(height);
  return luma + 2 * chroma;
}

Plane CopyPlane(const uint8_t* data, int width, int height) {
  Plane plane(width, height);
  for (int y = 0; y < height; ++y) {
    std::memcpy(plane.Row(y), data + static_cast<size_t>(y) * width, width);
  }
  return plane;
}

// Reads one planar 4:2:0 picture starting at |data|.
Frame DecodePayload(const uint8_t* data, int width, int height) {
  const int cw = ChromaSize(width);
  const int ch = ChromaSize(height);
  Frame frame;
  frame.luma = CopyPlane(data, width, height);
  data += static_cast<size_t>(width) * height;
  frame.cb = CopyPlane(data, cw, ch);
  data += static_cast<size_t>(cw) * ch;
  frame.cr = CopyPlane(data, cw, ch);
  return frame;
}

void AppendPlane(const Plane& plane, int width, int height, std::string& out) {
  for (int y = 0; y < height; ++y) {
    out.append(reinterpret_cast<const char*>(plane.Row(y)), width);
  }
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint8_t Hash8(int64_t x, int64_t y, uint64_t salt) {
  uint64_t h = SplitMix64(salt);
  h = SplitMix64(h ^ static_cast<uint64_t>(x));
  h = SplitMix64(h ^ static_cast<uint64_t>(y));
  return static_cast<uint8_t>(h >> 56);
}

// Value noise on an 8-pixel lattice plus per-pixel detail. Defined on the
// whole integer plane so moving content never runs out of texture.
uint8_t TextureSample(int64_t x, int64_t y, uint64_t seed) {
  const int64_t ix = x >> 3;
  const int64_t iy = y >> 3;
  const int fx = static_cast<int>(x & 7);
  const int fy = static_cast<int>(y & 7);
  const int v00 = Hash8(ix, iy, seed);
  const int v10 = Hash8(ix + 1, iy, seed);
  const int v01 = Hash8(ix, iy + 1, seed);
  const int v11 = Hash8(ix + 1, iy + 1, seed);
  const int top = v00 * (8 - fx) + v10 * fx;
  const int bottom = v01 * (8 - fx) + v11 * fx;
  const int coarse = (top * (8 - fy) + bottom * fy + 32) >> 6;
  const int detail = Hash8(x, y, seed ^ 0x5bd1e995ULL);
  return static_cast<uint8_t>((3 * coarse + detail + 2) / 4);
}

int64_t FloorMod(int64_t a, int64_t m) {
  const int64_t r = a % m;
  return r < 0 ? r + m : r;
}

struct ForegroundObject {
  int x0;
  int y0;
  int w;
  int h;
  Velocity velocity;
  uint64_t texture_seed;
};

std::vector<ForegroundObject> PlaceObjects(int width, int height,
                                           const Velocity& base,
                                           uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xf00dULL);
  const int count = std::clamp(width * height / 2048, 1, 8);
  const int max_side = std::max(16, std::min(width, height) / 2);
  std::vector<ForegroundObject> objects;
  for (int i = 0; i < count; ++i) {
    ForegroundObject o;
    o.w = 16 + static_cast<int>(UniformBelow(rng, max_side - 16 + 1));
    o.h = 16 + static_cast<int>(UniformBelow(rng, max_side - 16 + 1));
    o.x0 = static_cast<int>(UniformBelow(rng, width));
    o.y0 = static_cast<int>(UniformBelow(rng, height));
    o.velocity.dx = base.dx + static_cast<int>(UniformBelow(rng, 3)) - 1;
    o.velocity.dy = base.dy + static_cast<int>(UniformBelow(rng, 3)) - 1;
    o.texture_seed = rng();
    objects.push_back(o);
  }
  return objects;
}

Plane RenderParallax(int width, int height, int t, uint64_t seed,
                     const SyntheticMotion& motion,
                     const std::vector<ForegroundObject>& objects) {
  Plane plane(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      plane.at(x, y) = TextureSample(x - int64_t{motion.background.dx} * t,
                                     y - int64_t{motion.background.dy} * t,
                                     seed);
    }
  }
  for (const ForegroundObject& o : objects) {
    // Objects travel on a torus slightly larger than the frame so they leave
    // and re-enter instead of drifting away for good.
    const int64_t left =
        FloorMod(o.x0 + int64_t{o.velocity.dx} * t, width + o.w) - o.w;
    const int64_t top =
        FloorMod(o.y0 + int64_t{o.velocity.dy} * t, height + o.h) - o.h;
    for (int64_t y = std::max<int64_t>(top, 0);
         y < std::min<int64_t>(top + o.h, height); ++y) {
      for (int64_t x = std::max<int64_t>(left, 0);
           x < std::min<int64_t>(left + o.w, width); ++x) {
        // Per-frame grain on the foreground layer: averaging two references
        // suppresses it, a single reference cannot.
        const int grain =
            Hash8(x + int64_t{t} * width, y, o.texture_seed) % (2 * kGrain + 1) -
            kGrain;
        plane.at(static_cast<int>(x), static_cast<int>(y)) =
            static_cast<uint8_t>(std::clamp(
                TextureSample(x - left, y - top, o.texture_seed) + grain, 0,
                255));
      }
    }
  }
  return plane;
}

}  // namespace

int PadToBlockGrid(int size) {
  return (size + kBlockSize - 1) / kBlockSize * kBlockSize;
}

int ChromaSize(int luma_size) { return (luma_size + 1) / 2; }

Plane PadPlane(const Plane& logical, int padded_width, int padded_height) {
  Plane padded(padded_width, padded_height);
  for (int y = 0; y < padded_height; ++y) {
    for (int x = 0; x < padded_width; ++x) {
      padded.at(x, y) = logical.Clamped(x, y);
    }
  }
  return padded;
}

VideoClip MakeClip(int width, int height, FrameRate rate,
                   std::vector<Frame> logical_frames) {
  if (width <= 0 || height <= 0) {
    throw Error(StrFormat("invalid dimensions %dx%d", width, height));
  }
  VideoClip clip;
  clip.width = width;
  clip.height = height;
  clip.padded_width = PadToBlockGrid(width);
  clip.padded_height = PadToBlockGrid(height);
  clip.frame_rate = rate;
  clip.frames = std::move(logical_frames);
  for (Frame& frame : clip.frames) {
    if (frame.luma.width() != width || frame.luma.height() != height) {
      throw Error("frame luma size does not match clip size");
    }
    if (clip.padded_width != width || clip.padded_height != height) {
      frame.luma = PadPlane(frame.luma, clip.padded_width, clip.padded_height);
    }
  }
  ValidateClip(clip);
  return clip;
}

void ValidateClip(const VideoClip& clip) {
  if (clip.width <= 0 || clip.height <= 0) {
    throw Error(StrFormat("invalid dimensions %dx%d", clip.width, clip.height));
  }
  if (clip.padded_width != PadToBlockGrid(clip.width) ||
      clip.padded_height != PadToBlockGrid(clip.height)) {
    throw Error("padded size is not the next multiple of 16");
  }
  if (clip.frame_rate.num <= 0 || clip.frame_rate.den <= 0) {
    throw Error("frame rate must be positive");
  }
  if (clip.frames.size() < 2) {
    throw Error(StrFormat("need >= 2 frames, got %zu", clip.frames.size()));
  }
  const int cw = ChromaSize(clip.width);
  const int ch = ChromaSize(clip.height);
  for (const Frame& frame : clip.frames) {
    if (frame.luma.width() != clip.padded_width ||
        frame.luma.height() != clip.padded_height) {
      throw Error("frame luma does not match padded clip size");
    }
    if (frame.cb.width() != cw || frame.cb.height() != ch ||
        frame.cr.width() != cw || frame.cr.height() != ch) {
      throw Error("frame chroma does not match 4:2:0 clip size");
    }
  }
}

VideoClip ParseY4m(std::string_view bytes, std::optional<int> max_frames) {
  const size_t header_end = bytes.find('\n');
  if (header_end == std::string_view::npos) {
    throw Error("y4m: header line not terminated (byte 0)");
  }
  const std::string_view header = bytes.substr(0, header_end);
  if (header.substr(0, kY4mSignature.size()) != kY4mSignature ||
      (header.size() > kY4mSignature.size() &&
       header[kY4mSignature.size()] != ' ')) {
    throw Error("y4m: missing YUV4MPEG2 signature (byte 0)");
  }
  int width = 0;
  int height = 0;
  FrameRate rate{0, 0};
  size_t pos = kY4mSignature.size();
  while (pos < header.size()) {
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) break;
    size_t end = header.find(' ', pos);
    if (end == std::string_view::npos) end = header.size();
    const std::string_view token = header.substr(pos, end - pos);
    const std::string_view value = token.substr(1);
    try {
      switch (token[0]) {
        case 'W':
          width = ParseInt(value);
          break;
        case 'H':
          height = ParseInt(value);
          break;
        case 'F': {
          const auto parts = SplitString(value, ':');
          if (parts.size() != 2) throw Error("bad frame rate");
          rate = {ParseInt(parts[0]), ParseInt(parts[1])};
          break;
        }
        case 'C':
          if (value.substr(0, 3) != "420" ||
              (value.size() > 3 && value != "420jpeg" &&
               value != "420paldv" && value != "420mpeg2")) {
            throw Error("unsupported chroma tag C" + std::string(value) +
                        ", only 4:2:0 is accepted");
          }
          break;
        default:
          // Interlacing, aspect and extension tokens carry nothing we code.
          break;
      }
    } catch (const Error& e) {
      throw Error(StrFormat("y4m: %s (byte %zu)", e.what(), pos));
    }
    pos = end;
  }
  if (width <= 0 || height <= 0) {
    throw Error("y4m: header lacks positive W and H (byte 0)");
  }
  if (rate.num <= 0 || rate.den <= 0) {
    throw Error("y4m: header lacks a positive F rate (byte 0)");
  }

  const size_t payload = FramePayloadSize(width, height);
  std::vector<Frame> frames;
  size_t offset = header_end + 1;
  while (offset < bytes.size()) {
    if (max_frames && static_cast<int>(frames.size()) >= *max_frames) break;
    if (bytes.substr(offset, kFrameMarker.size()) != kFrameMarker) {
      throw Error(StrFormat("y4m: expected FRAME marker (byte %zu)", offset));
    }
    const size_t line_end = bytes.find('\n', offset);
    if (line_end == std::string_view::npos) {
      throw Error(
          StrFormat("y4m: unterminated FRAME marker (byte %zu)", offset));
    }
    const size_t data = line_end + 1;
    if (bytes.size() - data < payload) {
      throw Error(StrFormat(
          "y4m: truncated frame payload, need %zu bytes, have %zu (byte %zu)",
          payload, bytes.size() - data, data));
    }
    frames.push_back(DecodePayload(
        reinterpret_cast<const uint8_t*>(bytes.data() + data), width, height));
    offset = data + payload;
  }
  if (frames.size() < 2) {
    throw Error(StrFormat("y4m: need >= 2 frames, got %zu (byte %zu)",
                          frames.size(), offset));
  }
  return MakeClip(width, height, rate, std::move(frames));
}

VideoClip ReadY4m(const std::string& path, std::optional<int> max_frames) {
  try {
    return ParseY4m(ReadFile(path), max_frames);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string SerializeY4m(const VideoClip& clip) {
  if (clip.frames.empty()) throw Error("y4m: cannot write an empty clip");
  ValidateClip(clip);
  std::string out = StrFormat("YUV4MPEG2 W%d H%d F%d:%d C420jpeg\n", clip.width,
                              clip.height, clip.frame_rate.num,
                              clip.frame_rate.den);
  out.reserve(out.size() + clip.frames.size() *
                               (6 + FramePayloadSize(clip.width, clip.height)));
  const int cw = ChromaSize(clip.width);
  const int ch = ChromaSize(clip.height);
  for (const Frame& frame : clip.frames) {
    out += "FRAME\n";
    AppendPlane(frame.luma, clip.width, clip.height, out);
    AppendPlane(frame.cb, cw, ch, out);
    AppendPlane(frame.cr, cw, ch, out);
  }
  return out;
}

void WriteY4m(const VideoClip& clip, const std::string& path) {
  WriteFile(path, SerializeY4m(clip));
}

VideoClip ReadRawI420(const std::string& path, int width, int height,
                      FrameRate rate, std::optional<int> max_frames) {
  if (width <= 0 || height <= 0) {
    throw Error(StrFormat("raw: invalid dimensions %dx%d", width, height));
  }
  const std::string bytes = ReadFile(path);
  const size_t payload = FramePayloadSize(width, height);
  if (bytes.size() % payload != 0) {
    throw Error(StrFormat(
        "%s: raw size %zu is not a multiple of the %zu-byte frame (byte %zu)",
        path.c_str(), bytes.size(), payload,
        bytes.size() - bytes.size() % payload));
  }
  std::vector<Frame> frames;
  for (size_t offset = 0; offset < bytes.size(); offset += payload) {
    if (max_frames && static_cast<int>(frames.size()) >= *max_frames) break;
    frames.push_back(DecodePayload(
        reinterpret_cast<const uint8_t*>(bytes.data() + offset), width,
        height));
  }
  if (frames.size() < 2) {
    throw Error(StrFormat("%s: need >= 2 frames, got %zu", path.c_str(),
                          frames.size()));
  }
  return MakeClip(width, height, rate, std::move(frames));
}

std::optional<SyntheticKind> SyntheticKindFromName(std::string_view name) {
  if (name == "global_pan") return SyntheticKind::kGlobalPan;
  if (name == "two_layer_parallax") return SyntheticKind::kTwoLayerParallax;
  if (name == "noise") return SyntheticKind::kNoise;
  if (name == "static") return SyntheticKind::kStatic;
  return std::nullopt;
}

const char* SyntheticKindName(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kGlobalPan:
      return "global_pan";
    case SyntheticKind::kTwoLayerParallax:
      return "two_layer_parallax";
    case SyntheticKind::kNoise:
      return "noise";
    case SyntheticKind::kStatic:
      return "static";
  }
  return "unknown";
}

VideoClip GenSynthetic(SyntheticKind kind, int width, int height, int frames,
                       uint64_t seed, const SyntheticMotion& motion) {
  if (width < 32 || height < 32) {
    throw Error(StrFormat("synthetic clips need dimensions >= 32, got %dx%d",
                          width, height));
  }
  if (frames < 2) {
    throw Error(StrFormat("need >= 2 frames, got %d", frames));
  }
  const std::vector<ForegroundObject> objects =
      kind == SyntheticKind::kTwoLayerParallax
          ? PlaceObjects(width, height, motion.foreground, seed)
          : std::vector<ForegroundObject>{};
  const int cw = ChromaSize(width);
  const int ch = ChromaSize(height);
  std::vector<Frame> out;
  out.reserve(frames);
  for (int t = 0; t < frames; ++t) {
    Frame frame;
    frame.cb = Plane(cw, ch, 128);
    frame.cr = Plane(cw, ch, 128);
    switch (kind) {
      case SyntheticKind::kStatic:
        if (t > 0) {
          frame.luma = out.front().luma;
          break;
        }
        [[fallthrough]];
      case SyntheticKind::kGlobalPan: {
        const Velocity v = kind == SyntheticKind::kStatic ? Velocity{}
                                                          : motion.pan;
        frame.luma = Plane(width, height);
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            frame.luma.at(x, y) = TextureSample(x - int64_t{v.dx} * t,
                                                y - int64_t{v.dy} * t, seed);
          }
        }
        break;
      }
      case SyntheticKind::kTwoLayerParallax:
        frame.luma = RenderParallax(width, height, t, seed, motion, objects);
        break;
      case SyntheticKind::kNoise:
        frame.luma = Plane(width, height);
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            frame.luma.at(x, y) = Hash8(x + int64_t{t} * width, y, seed);
          }
        }
        break;
    }
    out.push_back(std::move(frame));
  }
  return MakeClip(width, height, FrameRate{30, 1}, std::move(out));
}

}  // namespace cgate
