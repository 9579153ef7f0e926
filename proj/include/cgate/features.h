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

#ifndef CGATE_FEATURES_H_
#define CGATE_FEATURES_H_

#include <array>
#include <string>

#include "cgate/codec.h"

namespace cgate {

// Gate features, all categorical:
//   f1  second reference of the left block   0..6 slot, 7 = NONE
//   f2  mode id of the left block            0..3 single, 4..11 compound,
//                                             12 = no left block
//   f3  second reference of the upper block  as f1
//   f4  mode id of the upper block           as f2
enum class Feature : uint8_t {
  kLeftSecondRef = 0,
  kLeftMode = 1,
  kTopSecondRef = 2,
  kTopMode = 3,
};
constexpr int kNumFeatures = 4;

// Number of distinct category values of each feature.
constexpr std::array<int, kNumFeatures> kFeatureCardinality = {
    kNumSlotValues, kNumModeIds, kNumSlotValues, kNumModeIds};

struct FeatureVector {
  ReferenceSlot left_second_ref = ReferenceSlot::kNone;
  int left_mode = kAbsentModeId;
  ReferenceSlot top_second_ref = ReferenceSlot::kNone;
  int top_mode = kAbsentModeId;

  int Value(int feature_index) const {
    switch (feature_index) {
      case 0:
        return SlotIndex(left_second_ref);
      case 1:
        return left_mode;
      case 2:
        return SlotIndex(top_second_ref);
      default:
        return top_mode;
    }
  }
  bool operator==(const FeatureVector& other) const = default;
};

// Builds a vector from integer codes, throwing on out-of-range values or a
// second reference paired with a single-mode neighbour.
FeatureVector FeatureVectorFromValues(const std::array<int, kNumFeatures>& v);

enum class Label : uint8_t { kClass0 = 0, kClass1 = 1 };

FeatureVector ExtractFeatures(const BlockRecord* left, const BlockRecord* top);

// Class0 iff the block was coded with a single reference.
Label LabelBlock(const BlockRecord& record);

struct LabeledSample {
  FeatureVector features;
  Label label = Label::kClass0;
  std::string clip_id;
  int qp = 0;
  int frame = 0;
  int block_x = 0;
  int block_y = 0;

  bool operator==(const LabeledSample& other) const = default;
};

}  // namespace cgate

#endif  // CGATE_FEATURES_H_
