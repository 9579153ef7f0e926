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

#ifndef CGATE_CODEC_H_
#define CGATE_CODEC_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cgate/video.h"

namespace cgate {

// Seven named reference slots plus the "no second reference" sentinel.
enum class ReferenceSlot : uint8_t {
  kLast = 0,
  kLast2 = 1,
  kLast3 = 2,
  kGolden = 3,
  kBwdref = 4,
  kAltref = 5,
  kAltref2 = 6,
  kNone = 7,
};

constexpr int kNumReferenceSlots = 7;
constexpr int kNumSlotValues = 8;

constexpr int SlotIndex(ReferenceSlot slot) { return static_cast<int>(slot); }
constexpr ReferenceSlot SlotFromIndex(int index) {
  return static_cast<ReferenceSlot>(index);
}
const char* SlotName(ReferenceSlot slot);
std::optional<ReferenceSlot> SlotFromName(std::string_view name);

// Full-pel displacement of content from the reference to the current frame:
// the prediction of sample (x, y) is ref(x - dx, y - dy).
struct MotionVector {
  int dx = 0;
  int dy = 0;

  bool operator==(const MotionVector& other) const = default;
};

inline MotionVector operator-(MotionVector a, MotionVector b) {
  return {a.dx - b.dx, a.dy - b.dy};
}

enum class SingleMode : uint8_t {
  kNearestMv = 0,
  kNearMv = 1,
  kNewMv = 2,
  kGlobalMv = 3,
};
constexpr int kNumSingleModes = 4;

enum class CompoundMode : uint8_t {
  kNearestNearestMv = 0,
  kNearNearMv = 1,
  kNearestNewMv = 2,
  kNewNearestMv = 3,
  kNearNewMv = 4,
  kNewNearMv = 5,
  kGlobalGlobalMv = 6,
  kNewNewMv = 7,
};
constexpr int kNumCompoundModes = 8;

// Mode ids shared by the block CSV and the gate features: single modes 0-3,
// compound modes 4-11, 12 for "no neighbour".
constexpr int kNumModeIds = 13;
constexpr int kAbsentModeId = 12;

const char* SingleModeName(SingleMode mode);
const char* CompoundModeName(CompoundMode mode);

// The single-reference candidate each half of a compound mode draws from.
struct CompoundComponents {
  SingleMode first;
  SingleMode second;
};
CompoundComponents ComponentsOf(CompoundMode mode);

struct SinglePrediction {
  SingleMode mode = SingleMode::kNearestMv;
  ReferenceSlot ref = ReferenceSlot::kLast;
  MotionVector mv;

  bool operator==(const SinglePrediction& other) const = default;
};

struct CompoundPrediction {
  CompoundMode mode = CompoundMode::kNearestNearestMv;
  ReferenceSlot ref0 = ReferenceSlot::kLast;
  ReferenceSlot ref1 = ReferenceSlot::kGolden;
  MotionVector mv0;
  MotionVector mv1;

  bool operator==(const CompoundPrediction& other) const = default;
};

using ModeChoice = std::variant<SinglePrediction, CompoundPrediction>;

inline bool IsCompound(const ModeChoice& choice) {
  return std::holds_alternative<CompoundPrediction>(choice);
}
int ModeId(const ModeChoice& choice);
std::string ModeName(const ModeChoice& choice);
ReferenceSlot SecondRef(const ModeChoice& choice);

// Throws if the choice violates the compound reference rules.
void ValidateChoice(const ModeChoice& choice);

// Position on the 16x16 block grid.
struct BlockPosition {
  int x = 0;
  int y = 0;

  int pixel_x() const { return x * kBlockSize; }
  int pixel_y() const { return y * kBlockSize; }
  bool operator==(const BlockPosition& other) const = default;
};

struct BlockRecord {
  int block_x = 0;
  int block_y = 0;
  ModeChoice choice;
  double rd_cost = 0.0;
  double rate_bits = 0.0;
  int64_t distortion_sse = 0;
  ReferenceSlot second_ref = ReferenceSlot::kNone;

  bool operator==(const BlockRecord& other) const = default;
};

BlockRecord MakeBlockRecord(BlockPosition pos, const ModeChoice& choice,
                            double lambda, double rate_bits,
                            int64_t distortion_sse);

// "frame,block_x,block_y,kind,mode,ref0,ref1,mv0x,mv0y,mv1x,mv1y,rate_bits,
// sse,rd_cost".
extern const char kBlockRecordCsvHeader[];
std::string BlockRecordCsvRow(int frame, const BlockRecord& record);
struct FramedBlockRecord {
  int frame = 0;
  BlockRecord record;
};
// Parses the 14 columns of BlockRecordCsvRow.
FramedBlockRecord ParseBlockRecordCsvRow(const std::vector<std::string>& fields,
                                         size_t first_column = 0);

struct QuantLevel {
  int qp = 0;
  double lambda = 0.0;
  double qstep = 0.0;

  static QuantLevel FromQp(int qp);
};

// qstep(qp) = 2^((qp - 12) / 8); lambda(qp) = 0.12 * qstep(qp)^2.
double QstepOfQp(int qp);
double LambdaOfQp(int qp);

// Reconstructed luma planes reachable through the seven named slots. A
// buffer describes the references available for coding frame next_frame().
class RefBuffer {
 public:
  // Buffer for coding the keyframe: nothing is available yet.
  static RefBuffer Start(int keyframe = 0);

  int next_frame() const { return next_frame_; }
  int keyframe() const { return keyframe_; }
  bool Has(ReferenceSlot slot) const { return Get(slot) != nullptr; }
  const Plane* Get(ReferenceSlot slot) const;
  // Display index of the frame behind |slot|, or -1 when absent.
  int FrameIndexOf(ReferenceSlot slot) const;

  friend RefBuffer AdvanceRefs(const RefBuffer& buffer, Plane reconstruction);

 private:
  int next_frame_ = 0;
  int keyframe_ = 0;
  std::shared_ptr<const Plane> keyframe_recon_;
  // Most recent first: recent_[0] is frame next_frame_ - 1.
  std::vector<std::shared_ptr<const Plane>> recent_;
};

// Slot age in frames when coding frame |t|.
int SlotAge(ReferenceSlot slot, int t, int keyframe);

// Appends the reconstruction of frame next_frame() and returns the buffer
// for the following frame.
RefBuffer AdvanceRefs(const RefBuffer& buffer, Plane reconstruction);

}  // namespace cgate

#endif  // CGATE_CODEC_H_
