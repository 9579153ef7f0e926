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


#ifndef CGATE_TESTS_TEST_SUPPORT_H_
#define CGATE_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "cgate/codec.h"
#include "cgate/video.h"

namespace cgate::testing {

// Plane whose samples come from |fn(x, y)|.
inline Plane PlaneFrom(int width, int height,
                       const std::function<int(int, int)>& fn) {
  Plane plane(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      plane.at(x, y) = static_cast<uint8_t>(fn(x, y));
    }
  }
  return plane;
}

inline Frame FrameFrom(const Plane& luma) {
  Frame frame;
  frame.luma = luma;
  frame.cb = Plane(ChromaSize(luma.width()), ChromaSize(luma.height()), 128);
  frame.cr = frame.cb;
  return frame;
}

// Buffer ready to code frame |planes.size()|.
inline RefBuffer BufferAfter(const std::vector<Plane>& planes) {
  RefBuffer buffer = RefBuffer::Start(0);
  for (const Plane& p : planes) buffer = AdvanceRefs(buffer, p);
  return buffer;
}

inline int Hashed(int x, int y, uint32_t seed) {
  uint32_t h = static_cast<uint32_t>(x) * 73856093u ^
               static_cast<uint32_t>(y) * 19349663u ^ seed * 83492791u;
  h ^= h >> 13;
  h *= 0x5bd1e995u;
  h ^= h >> 15;
  return static_cast<int>(h & 0xff);
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("cgate_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace cgate::testing

#endif  // CGATE_TESTS_TEST_SUPPORT_H_
