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

#ifndef CGATE_INTER_PREDICT_H_
#define CGATE_INTER_PREDICT_H_

#include <array>
#include <cstdint>

#include "cgate/codec.h"
#include "cgate/video.h"

namespace cgate {

constexpr int kBlockArea = kBlockSize * kBlockSize;
constexpr int kDefaultSearchRange = 8;
constexpr int kGlobalSearchRange = 8;
constexpr int kGlobalDecimation = 4;

using Block = std::array<uint8_t, kBlockArea>;

// Spatial MV candidates per reference slot.
struct MvCandidateSet {
  std::array<MotionVector, kNumReferenceSlots> nearest{};
  std::array<MotionVector, kNumReferenceSlots> near{};
};

// Already-coded neighbours of the current block in the current frame.
struct NeighborRecords {
  const BlockRecord* left = nullptr;
  const BlockRecord* top = nullptr;
  const BlockRecord* top_left = nullptr;
};

// One GLOBALMV vector per slot for the whole frame.
struct GlobalMotion {
  std::array<MotionVector, kNumReferenceSlots> gmv{};
};

// Neighbours are scanned left, top, top-left; a neighbour contributes to a
// slot only through the MV it used with that slot. nearest is the first
// contribution, near the next distinct one, both default to (0, 0).
MvCandidateSet BuildCandidates(const NeighborRecords& neighbors);

// Signed exp-Golomb order-0 length summed over both components.
int MvBits(MotionVector delta);

// Full search over [-8, 8]^2 on a 4x decimated grid minimising frame SAD.
MotionVector EstimateGlobalMotion(const Plane& current, const Plane& reference);

GlobalMotion EstimateGlobalMotionSet(const Plane& current,
                                     const RefBuffer& refs);

Block ExtractBlock(const Plane& plane, BlockPosition pos);

// Motion-compensated 16x16 copy with edge replication.
void PredictSingle(const Plane& reference, BlockPosition pos, MotionVector mv,
                   Block& out);

// Per-sample (p0 + p1 + 1) >> 1.
void AverageBlocks(const Block& p0, const Block& p1, Block& out);

// Throws when a referenced slot is absent.
Block Predict(const ModeChoice& choice, const RefBuffer& refs,
              BlockPosition pos);

int64_t Sad(const Block& a, const Block& b);
int64_t Sse(const Block& a, const Block& b);

// Projects |start| so the referenced block origin stays within one block of
// the reference plane.
MotionVector ClampMv(MotionVector start, BlockPosition pos,
                     const Plane& reference);

// Full search of the (2 * range + 1)^2 window around the clamped start,
// minimising SAD + lambda_mv * MvBits(mv - mv_pred). Ties prefer smaller
// |dx| + |dy|, then smaller dy, then smaller dx.
MotionVector MotionSearch(const Block& source, const Plane& reference,
                          BlockPosition pos, MotionVector start,
                          MotionVector mv_pred, double lambda_mv,
                          int range = kDefaultSearchRange);

// SAD + lambda_mv * MvBits(mv - mv_pred), the quantity MotionSearch
// minimises.
double MotionCost(const Block& source, const Plane& reference,
                  BlockPosition pos, MotionVector mv, MotionVector mv_pred,
                  double lambda_mv);

}  // namespace cgate

#endif  // CGATE_INTER_PREDICT_H_
