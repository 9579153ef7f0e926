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

#include "cgate/codec.h"

#include <cmath>
#include <utility>

#include "cgate/util.h"

namespace cgate {
namespace {

constexpr const char* kSlotNames[kNumSlotValues] = {
    "LAST", "LAST2", "LAST3", "GOLDEN", "BWDREF", "ALTREF", "ALTREF2", "NONE"};

constexpr const char* kSingleModeNames[kNumSingleModes] = {
    "NEARESTMV", "NEARMV", "NEWMV", "GLOBALMV"};

constexpr const char* kCompoundModeNames[kNumCompoundModes] = {
    "NEAREST_NEARESTMV", "NEAR_NEARMV",  "NEAREST_NEWMV",   "NEW_NEARESTMV",
    "NEAR_NEWMV",        "NEW_NEARMV",   "GLOBAL_GLOBALMV", "NEW_NEWMV"};

ReferenceSlot ParseSlot(const std::string& name) {
  const auto slot = SlotFromName(name);
  if (!slot) throw Error("unknown reference slot '" + name + "'");
  return *slot;
}

}  // namespace

const char kBlockRecordCsvHeader[] =
    "frame,block_x,block_y,kind,mode,ref0,ref1,mv0x,mv0y,mv1x,mv1y,rate_bits,"
    "sse,rd_cost";

const char* SlotName(ReferenceSlot slot) {
  const int index = SlotIndex(slot);
  return index >= 0 && index < kNumSlotValues ? kSlotNames[index] : "?";
}

std::optional<ReferenceSlot> SlotFromName(std::string_view name) {
  for (int i = 0; i < kNumSlotValues; ++i) {
    if (name == kSlotNames[i]) return SlotFromIndex(i);
  }
  return std::nullopt;
}

const char* SingleModeName(SingleMode mode) {
  return kSingleModeNames[static_cast<int>(mode)];
}

const char* CompoundModeName(CompoundMode mode) {
  return kCompoundModeNames[static_cast<int>(mode)];
}

CompoundComponents ComponentsOf(CompoundMode mode) {
  using S = SingleMode;
  switch (mode) {
    case CompoundMode::kNearestNearestMv:
      return {S::kNearestMv, S::kNearestMv};
    case CompoundMode::kNearNearMv:
      return {S::kNearMv, S::kNearMv};
    case CompoundMode::kNearestNewMv:
      return {S::kNearestMv, S::kNewMv};
    case CompoundMode::kNewNearestMv:
      return {S::kNewMv, S::kNearestMv};
    case CompoundMode::kNearNewMv:
      return {S::kNearMv, S::kNewMv};
    case CompoundMode::kNewNearMv:
      return {S::kNewMv, S::kNearMv};
    case CompoundMode::kGlobalGlobalMv:
      return {S::kGlobalMv, S::kGlobalMv};
    case CompoundMode::kNewNewMv:
      return {S::kNewMv, S::kNewMv};
  }
  throw Error("invalid compound mode");
}

int ModeId(const ModeChoice& choice) {
  if (const auto* single = std::get_if<SinglePrediction>(&choice)) {
    return static_cast<int>(single->mode);
  }
  return kNumSingleModes +
         static_cast<int>(std::get<CompoundPrediction>(choice).mode);
}

std::string ModeName(const ModeChoice& choice) {
  if (const auto* single = std::get_if<SinglePrediction>(&choice)) {
    return SingleModeName(single->mode);
  }
  return CompoundModeName(std::get<CompoundPrediction>(choice).mode);
}

ReferenceSlot SecondRef(const ModeChoice& choice) {
  if (const auto* compound = std::get_if<CompoundPrediction>(&choice)) {
    return compound->ref1;
  }
  return ReferenceSlot::kNone;
}

void ValidateChoice(const ModeChoice& choice) {
  if (const auto* single = std::get_if<SinglePrediction>(&choice)) {
    if (single->ref == ReferenceSlot::kNone) {
      throw Error("single prediction from the NONE slot");
    }
    return;
  }
  const auto& compound = std::get<CompoundPrediction>(choice);
  if (compound.ref0 == ReferenceSlot::kNone ||
      compound.ref1 == ReferenceSlot::kNone) {
    throw Error("compound prediction from the NONE slot");
  }
  if (compound.ref0 == compound.ref1) {
    throw Error("compound prediction needs two distinct references");
  }
}

BlockRecord MakeBlockRecord(BlockPosition pos, const ModeChoice& choice,
                            double lambda, double rate_bits,
                            int64_t distortion_sse) {
  BlockRecord record;
  record.block_x = pos.x;
  record.block_y = pos.y;
  record.choice = choice;
  record.rate_bits = rate_bits;
  record.distortion_sse = distortion_sse;
  record.rd_cost = static_cast<double>(distortion_sse) + lambda * rate_bits;
  record.second_ref = SecondRef(choice);
  return record;
}

std::string BlockRecordCsvRow(int frame, const BlockRecord& record) {
  std::string kind;
  ReferenceSlot ref0;
  ReferenceSlot ref1 = ReferenceSlot::kNone;
  MotionVector mv0;
  MotionVector mv1;
  if (const auto* single = std::get_if<SinglePrediction>(&record.choice)) {
    kind = "S";
    ref0 = single->ref;
    mv0 = single->mv;
  } else {
    const auto& compound = std::get<CompoundPrediction>(record.choice);
    kind = "C";
    ref0 = compound.ref0;
    ref1 = compound.ref1;
    mv0 = compound.mv0;
    mv1 = compound.mv1;
  }
  return StrFormat("%d,%d,%d,%s,%s,%s,%s,%d,%d,%d,%d,", frame, record.block_x,
                   record.block_y, kind.c_str(), ModeName(record.choice).c_str(),
                   SlotName(ref0), SlotName(ref1), mv0.dx, mv0.dy, mv1.dx,
                   mv1.dy) +
         FormatDouble(record.rate_bits) + "," +
         std::to_string(record.distortion_sse) + "," +
         FormatDouble(record.rd_cost);
}

FramedBlockRecord ParseBlockRecordCsvRow(const std::vector<std::string>& fields,
                                         size_t first_column) {
  if (fields.size() < first_column + 14) {
    throw Error("block record row has too few columns");
  }
  const auto col = [&](size_t i) -> const std::string& {
    return fields[first_column + i];
  };
  FramedBlockRecord out;
  out.frame = ParseInt(col(0));
  BlockRecord& r = out.record;
  r.block_x = ParseInt(col(1));
  r.block_y = ParseInt(col(2));
  const std::string& mode = col(4);
  const MotionVector mv0{ParseInt(col(7)), ParseInt(col(8))};
  const MotionVector mv1{ParseInt(col(9)), ParseInt(col(10))};
  if (col(3) == "S") {
    SinglePrediction single;
    bool found = false;
    for (int m = 0; m < kNumSingleModes; ++m) {
      if (mode == kSingleModeNames[m]) {
        single.mode = static_cast<SingleMode>(m);
        found = true;
      }
    }
    if (!found) throw Error("unknown single mode '" + mode + "'");
    single.ref = ParseSlot(col(5));
    single.mv = mv0;
    r.choice = single;
  } else if (col(3) == "C") {
    CompoundPrediction compound;
    bool found = false;
    for (int m = 0; m < kNumCompoundModes; ++m) {
      if (mode == kCompoundModeNames[m]) {
        compound.mode = static_cast<CompoundMode>(m);
        found = true;
      }
    }
    if (!found) throw Error("unknown compound mode '" + mode + "'");
    compound.ref0 = ParseSlot(col(5));
    compound.ref1 = ParseSlot(col(6));
    compound.mv0 = mv0;
    compound.mv1 = mv1;
    r.choice = compound;
  } else {
    throw Error("block kind must be S or C, got '" + col(3) + "'");
  }
  ValidateChoice(r.choice);
  r.rate_bits = ParseDouble(col(11));
  r.distortion_sse = std::stoll(col(12));
  r.rd_cost = ParseDouble(col(13));
  r.second_ref = SecondRef(r.choice);
  return out;
}

double QstepOfQp(int qp) {
  if (qp < 0 || qp > 63) throw Error(StrFormat("qp %d outside [0, 63]", qp));
  return std::exp2((qp - 12) / 8.0);
}

double LambdaOfQp(int qp) {
  const double qstep = QstepOfQp(qp);
  return 0.12 * qstep * qstep;
}

QuantLevel QuantLevel::FromQp(int qp) {
  return QuantLevel{qp, LambdaOfQp(qp), QstepOfQp(qp)};
}

int SlotAge(ReferenceSlot slot, int t, int keyframe) {
  switch (slot) {
    case ReferenceSlot::kLast:
      return 1;
    case ReferenceSlot::kLast2:
      return 2;
    case ReferenceSlot::kLast3:
      return 3;
    case ReferenceSlot::kGolden:
      return t - keyframe;
    case ReferenceSlot::kBwdref:
      return 4;
    case ReferenceSlot::kAltref:
      return 5;
    case ReferenceSlot::kAltref2:
      return 6;
    case ReferenceSlot::kNone:
      break;
  }
  throw Error("NONE has no age");
}

RefBuffer RefBuffer::Start(int keyframe) {
  RefBuffer buffer;
  buffer.next_frame_ = keyframe;
  buffer.keyframe_ = keyframe;
  return buffer;
}

int RefBuffer::FrameIndexOf(ReferenceSlot slot) const {
  if (slot == ReferenceSlot::kNone) return -1;
  const int age = SlotAge(slot, next_frame_, keyframe_);
  if (age < 1) return -1;
  const int index = next_frame_ - age;
  if (index < keyframe_ || index < 0) return -1;
  return index;
}

const Plane* RefBuffer::Get(ReferenceSlot slot) const {
  const int index = FrameIndexOf(slot);
  if (index < 0) return nullptr;
  if (index == keyframe_) return keyframe_recon_.get();
  const size_t age = static_cast<size_t>(next_frame_ - index);
  if (age > recent_.size()) return nullptr;
  return recent_[age - 1].get();
}

RefBuffer AdvanceRefs(const RefBuffer& buffer, Plane reconstruction) {
  if (!buffer.recent_.empty()) {
    const Plane& last = *buffer.recent_.front();
    if (last.width() != reconstruction.width() ||
        last.height() != reconstruction.height()) {
      throw Error("reconstruction size differs from the reference frames");
    }
  }
  RefBuffer next;
  next.keyframe_ = buffer.keyframe_;
  next.next_frame_ = buffer.next_frame_ + 1;
  auto recon = std::make_shared<const Plane>(std::move(reconstruction));
  next.keyframe_recon_ =
      buffer.next_frame_ == buffer.keyframe_ ? recon : buffer.keyframe_recon_;
  next.recent_.reserve(kNumReferenceSlots);
  next.recent_.push_back(std::move(recon));
  // Ages 1..6 cover every non-golden slot.
  for (size_t i = 0; i < buffer.recent_.size() && next.recent_.size() < 6;
       ++i) {
    next.recent_.push_back(buffer.recent_[i]);
  }
  return next;
}

}  // namespace cgate
