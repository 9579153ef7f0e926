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

#include "cgate/features.h"

#include "cgate/util.h"

namespace cgate {
namespace {

void Describe(const BlockRecord* record, ReferenceSlot& second_ref,
              int& mode) {
  if (record == nullptr) {
    second_ref = ReferenceSlot::kNone;
    mode = kAbsentModeId;
    return;
  }
  second_ref = SecondRef(record->choice);
  mode = ModeId(record->choice);
}

}  // namespace

FeatureVector FeatureVectorFromValues(const std::array<int, kNumFeatures>& v) {
  for (int f = 0; f < kNumFeatures; ++f) {
    if (v[f] < 0 || v[f] >= kFeatureCardinality[f]) {
      throw Error(StrFormat("feature f%d value %d out of range", f + 1, v[f]));
    }
  }
  FeatureVector out;
  out.left_second_ref = SlotFromIndex(v[0]);
  out.left_mode = v[1];
  out.top_second_ref = SlotFromIndex(v[2]);
  out.top_mode = v[3];
  const auto check = [](ReferenceSlot ref, int mode, int f) {
    const bool compound = mode >= kNumSingleModes && mode < kAbsentModeId;
    if (compound == (ref == ReferenceSlot::kNone)) {
      throw Error(StrFormat(
          "feature f%d: second reference inconsistent with mode id %d", f,
          mode));
    }
  };
  check(out.left_second_ref, out.left_mode, 1);
  check(out.top_second_ref, out.top_mode, 3);
  return out;
}

FeatureVector ExtractFeatures(const BlockRecord* left, const BlockRecord* top) {
  FeatureVector features;
  Describe(left, features.left_second_ref, features.left_mode);
  Describe(top, features.top_second_ref, features.top_mode);
  return features;
}

Label LabelBlock(const BlockRecord& record) {
  return IsCompound(record.choice) ? Label::kClass1 : Label::kClass0;
}

}  // namespace cgate
