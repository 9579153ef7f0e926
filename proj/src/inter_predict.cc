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

#include "cgate/inter_predict.h"

#include <algorithm>
#include <cstdlib>
#include <tuple>

#include "cgate/util.h"

namespace cgate {
namespace {

int ExpGolombLength(int value) {
  int magnitude = std::abs(value) + 1;
  int log2 = 0;
  while (magnitude > 1) {
    magnitude >>= 1;
    ++log2;
  }
  return 2 * log2 + 1;
}

// Lexicographic search order shared by global and block motion search.
template <typename Cost>
bool Better(Cost cost, MotionVector mv, Cost best_cost, MotionVector best) {
  const auto key = [](Cost c, MotionVector v) {
    return std::make_tuple(c, std::abs(v.dx) + std::abs(v.dy), v.dy, v.dx);
  };
  return key(cost, mv) < key(best_cost, best);
}

void ContributeMv(const BlockRecord* record,
                  std::array<std::array<MotionVector, 3>, kNumReferenceSlots>&
                      found,
                  std::array<int, kNumReferenceSlots>& counts) {
  if (record == nullptr) return;
  const auto add = [&](ReferenceSlot slot, MotionVector mv) {
    const int s = SlotIndex(slot);
    found[s][counts[s]++] = mv;
  };
  if (const auto* single = std::get_if<SinglePrediction>(&record->choice)) {
    add(single->ref, single->mv);
  } else {
    const auto& compound = std::get<CompoundPrediction>(record->choice);
    add(compound.ref0, compound.mv0);
    add(compound.ref1, compound.mv1);
  }
}

}  // namespace

MvCandidateSet BuildCandidates(const NeighborRecords& neighbors) {
  std::array<std::array<MotionVector, 3>, kNumReferenceSlots> found{};
  std::array<int, kNumReferenceSlots> counts{};
  ContributeMv(neighbors.left, found, counts);
  ContributeMv(neighbors.top, found, counts);
  ContributeMv(neighbors.top_left, found, counts);
  MvCandidateSet set;
  for (int s = 0; s < kNumReferenceSlots; ++s) {
    if (counts[s] == 0) continue;
    set.nearest[s] = found[s][0];
    for (int i = 1; i < counts[s]; ++i) {
      if (!(found[s][i] == found[s][0])) {
        set.near[s] = found[s][i];
        break;
      }
    }
  }
  return set;
}

int MvBits(MotionVector delta) {
  return ExpGolombLength(delta.dx) + ExpGolombLength(delta.dy);
}

MotionVector EstimateGlobalMotion(const Plane& current,
                                  const Plane& reference) {
  if (current.width() != reference.width() ||
      current.height() != reference.height()) {
    throw Error("global motion: frame sizes differ");
  }
  MotionVector best;
  int64_t best_sad = INT64_MAX;
  for (int dy = -kGlobalSearchRange; dy <= kGlobalSearchRange; ++dy) {
    for (int dx = -kGlobalSearchRange; dx <= kGlobalSearchRange; ++dx) {
      int64_t sad = 0;
      for (int y = 0; y < current.height(); y += kGlobalDecimation) {
        for (int x = 0; x < current.width(); x += kGlobalDecimation) {
          sad += std::abs(current.at(x, y) - reference.Clamped(x - dx, y - dy));
        }
      }
      const MotionVector mv{dx, dy};
      if (Better(sad, mv, best_sad, best)) {
        best_sad = sad;
        best = mv;
      }
    }
  }
  return best;
}

GlobalMotion EstimateGlobalMotionSet(const Plane& current,
                                     const RefBuffer& refs) {
  GlobalMotion motion;
  for (int s = 0; s < kNumReferenceSlots; ++s) {
    const Plane* reference = refs.Get(SlotFromIndex(s));
    if (reference == nullptr) continue;
    // Several slots may alias one reconstruction early in the clip.
    bool reused = false;
    for (int prior = 0; prior < s; ++prior) {
      if (refs.Get(SlotFromIndex(prior)) == reference) {
        motion.gmv[s] = motion.gmv[prior];
        reused = true;
        break;
      }
    }
    if (!reused) motion.gmv[s] = EstimateGlobalMotion(current, *reference);
  }
  return motion;
}

Block ExtractBlock(const Plane& plane, BlockPosition pos) {
  Block block;
  const int x0 = pos.pixel_x();
  const int y0 = pos.pixel_y();
  for (int y = 0; y < kBlockSize; ++y) {
    for (int x = 0; x < kBlockSize; ++x) {
      block[y * kBlockSize + x] = plane.Clamped(x0 + x, y0 + y);
    }
  }
  return block;
}

void PredictSingle(const Plane& reference, BlockPosition pos, MotionVector mv,
                   Block& out) {
  const int x0 = pos.pixel_x() - mv.dx;
  const int y0 = pos.pixel_y() - mv.dy;
  if (x0 >= 0 && y0 >= 0 && x0 + kBlockSize <= reference.width() &&
      y0 + kBlockSize <= reference.height()) {
    for (int y = 0; y < kBlockSize; ++y) {
      const uint8_t* row = reference.Row(y0 + y) + x0;
      std::copy(row, row + kBlockSize, out.begin() + y * kBlockSize);
    }
    return;
  }
  for (int y = 0; y < kBlockSize; ++y) {
    for (int x = 0; x < kBlockSize; ++x) {
      out[y * kBlockSize + x] = reference.Clamped(x0 + x, y0 + y);
    }
  }
}

void AverageBlocks(const Block& p0, const Block& p1, Block& out) {
  for (int i = 0; i < kBlockArea; ++i) {
    out[i] = static_cast<uint8_t>((p0[i] + p1[i] + 1) >> 1);
  }
}

Block Predict(const ModeChoice& choice, const RefBuffer& refs,
              BlockPosition pos) {
  ValidateChoice(choice);
  const auto reference = [&](ReferenceSlot slot) -> const Plane& {
    const Plane* plane = refs.Get(slot);
    if (plane == nullptr) {
      throw Error(StrFormat("reference slot %s is absent", SlotName(slot)));
    }
    return *plane;
  };
  Block out;
  if (const auto* single = std::get_if<SinglePrediction>(&choice)) {
    PredictSingle(reference(single->ref), pos, single->mv, out);
    return out;
  }
  const auto& compound = std::get<CompoundPrediction>(choice);
  Block p0;
  Block p1;
  PredictSingle(reference(compound.ref0), pos, compound.mv0, p0);
  PredictSingle(reference(compound.ref1), pos, compound.mv1, p1);
  AverageBlocks(p0, p1, out);
  return out;
}

int64_t Sad(const Block& a, const Block& b) {
  int64_t sum = 0;
  for (int i = 0; i < kBlockArea; ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

int64_t Sse(const Block& a, const Block& b) {
  int64_t sum = 0;
  for (int i = 0; i < kBlockArea; ++i) {
    const int d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

MotionVector ClampMv(MotionVector start, BlockPosition pos,
                     const Plane& reference) {
  // Reference origin pixel_x - dx must stay within [-16, width].
  return {std::clamp(start.dx, pos.pixel_x() - reference.width(),
                     pos.pixel_x() + kBlockSize),
          std::clamp(start.dy, pos.pixel_y() - reference.height(),
                     pos.pixel_y() + kBlockSize)};
}

double MotionCost(const Block& source, const Plane& reference,
                  BlockPosition pos, MotionVector mv, MotionVector mv_pred,
                  double lambda_mv) {
  Block prediction;
  PredictSingle(reference, pos, mv, prediction);
  return static_cast<double>(Sad(source, prediction)) +
         lambda_mv * MvBits(mv - mv_pred);
}

MotionVector MotionSearch(const Block& source, const Plane& reference,
                          BlockPosition pos, MotionVector start,
                          MotionVector mv_pred, double lambda_mv, int range) {
  const MotionVector center = ClampMv(start, pos, reference);
  MotionVector best = center;
  double best_cost = MotionCost(source, reference, pos, center, mv_pred,
                                lambda_mv);
  Block prediction;
  for (int dy = center.dy - range; dy <= center.dy + range; ++dy) {
    for (int dx = center.dx - range; dx <= center.dx + range; ++dx) {
      const MotionVector mv{dx, dy};
      PredictSingle(reference, pos, mv, prediction);
      const double cost = static_cast<double>(Sad(source, prediction)) +
                          lambda_mv * MvBits(mv - mv_pred);
      if (Better(cost, mv, best_cost, best)) {
        best_cost = cost;
        best = mv;
      }
    }
  }
  return best;
}

}  // namespace cgate
