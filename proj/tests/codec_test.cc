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

#include <cmath>
#include <random>
#include <vector>

#include "cgate/codec.h"
#include "cgate/util.h"
#include "test_support.h"

namespace cgate {
namespace {

TEST(QuantTest, FormulaPoints) {
  EXPECT_DOUBLE_EQ(QstepOfQp(12), 1.0);
  EXPECT_DOUBLE_EQ(LambdaOfQp(12), 0.12);
  EXPECT_DOUBLE_EQ(QstepOfQp(20), 2.0);
  EXPECT_NEAR(LambdaOfQp(20), 0.48, 1e-12);
  EXPECT_LT(LambdaOfQp(32), LambdaOfQp(43));
  const QuantLevel q = QuantLevel::FromQp(20);
  EXPECT_EQ(q.qp, 20);
  EXPECT_DOUBLE_EQ(q.qstep, 2.0);
  EXPECT_NEAR(q.lambda, 0.48, 1e-12);
}

TEST(QuantTest, StrictlyIncreasing) {
  for (int qp = 1; qp <= 63; ++qp) {
    EXPECT_LT(QstepOfQp(qp - 1), QstepOfQp(qp));
    EXPECT_LT(LambdaOfQp(qp - 1), LambdaOfQp(qp));
    EXPECT_NEAR(LambdaOfQp(qp), 0.12 * std::pow(2.0, (qp - 12) / 4.0), 1e-12);
  }
  EXPECT_THROW(LambdaOfQp(-1), Error);
  EXPECT_THROW(QstepOfQp(64), Error);
}

TEST(SlotTest, RoundTrips) {
  for (int i = 0; i < kNumSlotValues; ++i) {
    const ReferenceSlot slot = SlotFromIndex(i);
    EXPECT_EQ(SlotIndex(slot), i);
    EXPECT_EQ(SlotFromName(SlotName(slot)), slot);
  }
  EXPECT_STREQ(SlotName(ReferenceSlot::kGolden), "GOLDEN");
  EXPECT_FALSE(SlotFromName("LAST4").has_value());
}

std::vector<Plane> NumberedPlanes(int n) {
  std::vector<Plane> planes;
  for (int i = 0; i < n; ++i) planes.emplace_back(32, 32, static_cast<uint8_t>(i));
  return planes;
}

int FrameBehind(const RefBuffer& buffer, ReferenceSlot slot) {
  const Plane* plane = buffer.Get(slot);
  return plane ? plane->at(0, 0) : -1;
}

TEST(RefBufferTest, StartIsEmpty) {
  const RefBuffer start = RefBuffer::Start(0);
  for (int i = 0; i < kNumReferenceSlots; ++i) {
    EXPECT_FALSE(start.Has(SlotFromIndex(i)));
  }
  EXPECT_FALSE(start.Has(ReferenceSlot::kNone));
}

TEST(RefBufferTest, AfterFirstFrame) {
  const RefBuffer buffer = testing::BufferAfter(NumberedPlanes(1));
  EXPECT_EQ(buffer.next_frame(), 1);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kLast), 0);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kGolden), 0);
  for (ReferenceSlot slot :
       {ReferenceSlot::kLast2, ReferenceSlot::kLast3, ReferenceSlot::kBwdref,
        ReferenceSlot::kAltref, ReferenceSlot::kAltref2}) {
    EXPECT_FALSE(buffer.Has(slot));
  }
}

TEST(RefBufferTest, AfterSevenFrames) {
  const RefBuffer buffer = testing::BufferAfter(NumberedPlanes(7));
  EXPECT_EQ(buffer.next_frame(), 7);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kLast), 6);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kLast2), 5);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kLast3), 4);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kBwdref), 3);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kAltref), 2);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kAltref2), 1);
  EXPECT_EQ(FrameBehind(buffer, ReferenceSlot::kGolden), 0);
}

// Hand table of slot ages.
TEST(RefBufferTest, MatchesAgeTable) {
  const int ages[kNumReferenceSlots] = {1, 2, 3, -1, 4, 5, 6};
  const std::vector<Plane> planes = NumberedPlanes(12);
  for (int t = 1; t <= 11; ++t) {
    const RefBuffer buffer = testing::BufferAfter(
        std::vector<Plane>(planes.begin(), planes.begin() + t));
    for (int i = 0; i < kNumReferenceSlots; ++i) {
      const ReferenceSlot slot = SlotFromIndex(i);
      const int age = ages[i] < 0 ? t : ages[i];
      const int expected = t - age >= 0 ? t - age : -1;
      EXPECT_EQ(buffer.FrameIndexOf(slot), expected) << t << " " << i;
      EXPECT_EQ(FrameBehind(buffer, slot), expected) << t << " " << i;
    }
    EXPECT_TRUE(buffer.Has(ReferenceSlot::kLast));
  }
}

TEST(RefBufferTest, RejectsMismatchedDimensions) {
  const RefBuffer buffer = testing::BufferAfter(NumberedPlanes(2));
  EXPECT_THROW(AdvanceRefs(buffer, Plane(48, 32)), Error);
}

TEST(RefBufferTest, StaticClipSlotsIdentical) {
  const std::vector<Plane> planes(8, testing::PlaneFrom(32, 32, [](int x, int y) {
                                    return testing::Hashed(x, y, 3);
                                  }));
  const RefBuffer buffer = testing::BufferAfter(planes);
  for (int i = 0; i < kNumReferenceSlots; ++i) {
    ASSERT_TRUE(buffer.Has(SlotFromIndex(i)));
    EXPECT_EQ(*buffer.Get(SlotFromIndex(i)), planes[0]);
  }
}

TEST(ModeTest, IdsAndNames) {
  for (int m = 0; m < kNumSingleModes; ++m) {
    EXPECT_EQ(ModeId(SinglePrediction{static_cast<SingleMode>(m)}), m);
  }
  for (int m = 0; m < kNumCompoundModes; ++m) {
    EXPECT_EQ(ModeId(CompoundPrediction{static_cast<CompoundMode>(m)}), 4 + m);
  }
  EXPECT_EQ(ModeName(SinglePrediction{SingleMode::kNewMv}), "NEWMV");
  EXPECT_EQ(ModeName(CompoundPrediction{CompoundMode::kNearestNewMv}),
            "NEAREST_NEWMV");
  const CompoundComponents c = ComponentsOf(CompoundMode::kNewNearMv);
  EXPECT_EQ(c.first, SingleMode::kNewMv);
  EXPECT_EQ(c.second, SingleMode::kNearMv);
}

TEST(ModeTest, ValidatesReferences) {
  EXPECT_NO_THROW(ValidateChoice(SinglePrediction{}));
  EXPECT_THROW(ValidateChoice(SinglePrediction{SingleMode::kNewMv,
                                               ReferenceSlot::kNone}),
               Error);
  CompoundPrediction same;
  same.ref1 = same.ref0;
  EXPECT_THROW(ValidateChoice(same), Error);
  CompoundPrediction none;
  none.ref1 = ReferenceSlot::kNone;
  EXPECT_THROW(ValidateChoice(none), Error);
}

TEST(BlockRecordTest, CostIsDistortionPlusLambdaRate) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lambda(0.01, 500.0);
  std::uniform_real_distribution<double> rate(1.0, 4000.0);
  for (int i = 0; i < 1000; ++i) {
    const double l = lambda(rng);
    const double r = rate(rng);
    const int64_t sse = static_cast<int64_t>(rng() % 1000000);
    const BlockRecord record =
        MakeBlockRecord({1, 2}, SinglePrediction{}, l, r, sse);
    EXPECT_NEAR(record.rd_cost, sse + l * r, 1e-6 * (sse + l * r));
    EXPECT_EQ(record.second_ref, ReferenceSlot::kNone);
  }
  CompoundPrediction compound;
  compound.ref1 = ReferenceSlot::kBwdref;
  EXPECT_EQ(MakeBlockRecord({0, 0}, compound, 1.0, 1.0, 0).second_ref,
            ReferenceSlot::kBwdref);
}

TEST(BlockRecordTest, CsvRoundTrip) {
  CompoundPrediction compound{CompoundMode::kNewNewMv, ReferenceSlot::kGolden,
                              ReferenceSlot::kAltref2, {-3, 7}, {8, -8}};
  SinglePrediction single{SingleMode::kGlobalMv, ReferenceSlot::kLast3, {2, 0}};
  for (const ModeChoice& choice : {ModeChoice(compound), ModeChoice(single)}) {
    const BlockRecord record =
        MakeBlockRecord({3, 5}, choice, LambdaOfQp(43), 37.42, 1234);
    const std::string row = BlockRecordCsvRow(9, record);
    const FramedBlockRecord parsed = ParseBlockRecordCsvRow(SplitString(row, ','));
    EXPECT_EQ(parsed.frame, 9);
    EXPECT_EQ(parsed.record, record);
    EXPECT_EQ(BlockRecordCsvRow(9, parsed.record), row);
  }
  EXPECT_EQ(SplitString(kBlockRecordCsvHeader, ',').size(), 14u);
}

}  // namespace
}  // namespace cgate
