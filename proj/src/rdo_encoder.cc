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

#include "cgate/rdo_encoder.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "cgate/metrics.h"
#include "cgate/util.h"

namespace cgate {
namespace {

constexpr std::array<ReferenceSlot, 3> kCompoundFirstRefs = {
    ReferenceSlot::kLast, ReferenceSlot::kGolden, ReferenceSlot::kBwdref};

// 2 * floor(log2(|q| + 1)) + 1 for a nonzero level.
double LevelBits(int level) {
  unsigned magnitude = static_cast<unsigned>(std::abs(level)) + 1;
  int log2 = 0;
  while (magnitude > 1) {
    magnitude >>= 1;
    ++log2;
  }
  return 2.0 * log2 + 1.0;
}

double ResidualBits(const Coefficients& levels) {
  int zeros = 0;
  double bits = 0.0;
  for (int level : levels) {
    if (level == 0) {
      ++zeros;
    } else {
      bits += LevelBits(level);
    }
  }
  return bits + kZeroCoefficientBits * zeros;
}

struct Candidate {
  ModeChoice choice;
  double rd_cost = 0.0;
  double rate_bits = 0.0;
  int64_t sse = 0;
  Block reconstruction{};
};

class BlockSearch {
 public:
  explicit BlockSearch(const BlockContext& context)
      : context_(context), source_(ExtractBlock(*context.source, context.pos)) {}

  void PrepareSingleCandidates() {
    const double lambda_mv = std::sqrt(context_.quant.lambda);
    for (int s = 0; s < kNumReferenceSlots; ++s) {
      const Plane* reference = context_.refs->Get(SlotFromIndex(s));
      present_[s] = reference != nullptr;
      if (!present_[s]) continue;
      const MotionVector nearest = context_.candidates.nearest[s];
      mvs_[0][s] = nearest;
      mvs_[1][s] = context_.candidates.near[s];
      mvs_[2][s] = MotionSearch(source_, *reference, context_.pos, nearest,
                                nearest, lambda_mv);
      mvs_[3][s] = context_.global_motion.gmv[s];
      for (int m = 0; m < kNumSingleModes; ++m) {
        PredictSingle(*reference, context_.pos, mvs_[m][s], predictions_[m][s]);
      }
    }
    if (!present_[SlotIndex(ReferenceSlot::kLast)]) {
      throw Error("inter block coded without a LAST reference");
    }
  }

  void SearchSingle() {
    for (int m = 0; m < kNumSingleModes; ++m) {
      for (int s = 0; s < kNumReferenceSlots; ++s) {
        if (!present_[s]) continue;
        Consider(SinglePrediction{static_cast<SingleMode>(m), SlotFromIndex(s),
                                  mvs_[m][s]},
                 predictions_[m][s]);
      }
    }
  }

  void SearchCompound() {
    const auto pairs = CompoundPairs(*context_.refs);
    Block average;
    for (int m = 0; m < kNumCompoundModes; ++m) {
      const auto mode = static_cast<CompoundMode>(m);
      const CompoundComponents parts = ComponentsOf(mode);
      const int first = static_cast<int>(parts.first);
      const int second = static_cast<int>(parts.second);
      for (const auto& [ref0, ref1] : pairs) {
        const int s0 = SlotIndex(ref0);
        const int s1 = SlotIndex(ref1);
        AverageBlocks(predictions_[first][s0], predictions_[second][s1],
                      average);
        Consider(CompoundPrediction{mode, ref0, ref1, mvs_[first][s0],
                                    mvs_[second][s1]},
                 average);
      }
    }
  }

  BlockCoding Result() const {
    BlockCoding coding;
    coding.record =
        MakeBlockRecord(context_.pos, best_.choice, context_.quant.lambda,
                        best_.rate_bits, best_.sse);
    coding.reconstruction = best_.reconstruction;
    return coding;
  }

 private:
  // Strict comparison: the first candidate in evaluation order wins ties,
  // which makes single beat compound and lower mode/slot indices win.
  void Consider(const ModeChoice& choice, const Block& prediction) {
    Coefficients residual;
    for (int i = 0; i < kBlockArea; ++i) residual[i] = source_[i] - prediction[i];
    const QuantizedResidual quantized =
        QuantizeResidual(residual, context_.quant.qstep);
    Block reconstruction;
    for (int i = 0; i < kBlockArea; ++i) {
      reconstruction[i] = static_cast<uint8_t>(
          std::clamp(prediction[i] + quantized.dequantized[i], 0, 255));
    }
    const int64_t sse = Sse(source_, reconstruction);
    const double rate =
        RateOfBlock(choice, quantized.levels, context_.candidates);
    const double cost = static_cast<double>(sse) + context_.quant.lambda * rate;
    if (!has_best_ || cost < best_.rd_cost) {
      has_best_ = true;
      best_.choice = choice;
      best_.rd_cost = cost;
      best_.rate_bits = rate;
      best_.sse = sse;
      best_.reconstruction = reconstruction;
    }
  }

  const BlockContext& context_;
  const Block source_;
  std::array<bool, kNumReferenceSlots> present_{};
  std::array<std::array<MotionVector, kNumReferenceSlots>, kNumSingleModes>
      mvs_{};
  std::array<std::array<Block, kNumReferenceSlots>, kNumSingleModes>
      predictions_{};
  bool has_best_ = false;
  Candidate best_;
};

Plane BlankLike(const Plane& plane) {
  return Plane(plane.width(), plane.height());
}

void StoreBlock(const Block& block, BlockPosition pos, Plane& plane) {
  for (int y = 0; y < kBlockSize; ++y) {
    std::copy(block.begin() + y * kBlockSize,
              block.begin() + (y + 1) * kBlockSize,
              plane.Row(pos.pixel_y() + y) + pos.pixel_x());
  }
}

}  // namespace

Strategy Strategy::Gated(std::shared_ptr<const GateModel> model) {
  if (!model) throw Error("gated strategy needs a trained gate model");
  return Strategy(Kind::kGated, std::move(model));
}

std::string Strategy::name() const {
  switch (kind_) {
    case Kind::kExhaustive:
      return "exhaustive";
    case Kind::kSkipCompound:
      return "skip";
    case Kind::kGated:
      return "gated";
  }
  return "unknown";
}

QuantizedResidual QuantizeResidual(const Coefficients& residual,
                                   double qstep) {
  if (!(qstep > 0.0)) throw Error("qstep must be positive");
  const int dequant_step = static_cast<int>(std::lround(qstep));
  QuantizedResidual out;
  for (int i = 0; i < kBlockArea; ++i) {
    const int r = residual[i];
    const int magnitude = static_cast<int>(std::floor(std::abs(r) / qstep));
    const int level = r < 0 ? -magnitude : magnitude;
    out.levels[i] = level;
    out.dequantized[i] = level * dequant_step;
  }
  return out;
}

double RateOfBlock(const ModeChoice& choice, const Coefficients& levels,
                   const MvCandidateSet& candidates) {
  double bits = 0.0;
  if (const auto* single = std::get_if<SinglePrediction>(&choice)) {
    bits += kSingleModeBits;
    if (single->mode == SingleMode::kNewMv) {
      bits += MvBits(single->mv - candidates.nearest[SlotIndex(single->ref)]);
    }
  } else {
    const auto& compound = std::get<CompoundPrediction>(choice);
    bits += kCompoundModeBits;
    const CompoundComponents parts = ComponentsOf(compound.mode);
    if (parts.first == SingleMode::kNewMv) {
      bits += MvBits(compound.mv0 -
                     candidates.nearest[SlotIndex(compound.ref0)]);
    }
    if (parts.second == SingleMode::kNewMv) {
      bits += MvBits(compound.mv1 -
                     candidates.nearest[SlotIndex(compound.ref1)]);
    }
  }
  return bits + ResidualBits(levels);
}

std::vector<std::pair<ReferenceSlot, ReferenceSlot>> CompoundPairs(
    const RefBuffer& refs) {
  std::vector<std::pair<ReferenceSlot, ReferenceSlot>> pairs;
  const auto is_first = [](ReferenceSlot slot) {
    return std::find(kCompoundFirstRefs.begin(), kCompoundFirstRefs.end(),
                     slot) != kCompoundFirstRefs.end();
  };
  for (ReferenceSlot ref0 : kCompoundFirstRefs) {
    if (!refs.Has(ref0)) continue;
    for (int s = 0; s < kNumReferenceSlots; ++s) {
      const ReferenceSlot ref1 = SlotFromIndex(s);
      if (ref1 == ref0 || !refs.Has(ref1)) continue;
      // The average is symmetric and every compound mode has its mirrored
      // twin, so an unordered pair is searched once.
      if (is_first(ref1) && SlotIndex(ref1) < SlotIndex(ref0)) continue;
      pairs.emplace_back(ref0, ref1);
    }
  }
  return pairs;
}

BlockCoding CodeBlock(const BlockContext& context, bool test_compound) {
  BlockSearch search(context);
  search.PrepareSingleCandidates();
  search.SearchSingle();
  if (test_compound) search.SearchCompound();
  return search.Result();
}

BlockCoding CodeBlock(const BlockContext& context, const Strategy& strategy,
                      const FeatureVector& features) {
  switch (strategy.kind()) {
    case Strategy::Kind::kExhaustive:
      return CodeBlock(context, true);
    case Strategy::Kind::kSkipCompound:
      return CodeBlock(context, false);
    case Strategy::Kind::kGated: {
      const Label gate = strategy.model()->Classify(features);
      BlockCoding coding = CodeBlock(context, gate == Label::kClass1);
      coding.gate = gate;
      return coding;
    }
  }
  throw Error("unknown strategy");
}

int EncodeReport::InterFrameCount() const {
  return static_cast<int>(std::count_if(
      frames.begin(), frames.end(),
      [](const FrameReport& f) { return !f.keyframe; }));
}

double EncodeReport::InterRateBps(const FrameRate& rate) const {
  double bits = 0.0;
  for (const FrameReport& f : frames) {
    if (!f.keyframe) bits += f.rate_bits;
  }
  const int n = InterFrameCount();
  return n == 0 ? 0.0 : bits * rate.fps() / n;
}

double EncodeReport::InterPsnrDb() const {
  double sum = 0.0;
  for (const FrameReport& f : frames) {
    if (!f.keyframe) sum += f.psnr_db;
  }
  const int n = InterFrameCount();
  return n == 0 ? 0.0 : sum / n;
}

EncodeReport EncodeClip(const VideoClip& clip, const QuantLevel& q,
                        const Strategy& strategy,
                        const EncodeOptions& options) {
  ValidateClip(clip);
  const int n_frames =
      options.frame_limit > 0
          ? std::min<int>(options.frame_limit, clip.frames.size())
          : static_cast<int>(clip.frames.size());
  if (n_frames < 2) throw Error("encode needs at least 2 frames");
  const int cols = clip.padded_width / kBlockSize;
  const int rows = clip.padded_height / kBlockSize;
  const bool gated = strategy.kind() == Strategy::Kind::kGated;

  EncodeReport report;
  report.strategy = strategy.name();
  report.qp = q.qp;

  RefBuffer refs = RefBuffer::Start(0);
  {
    FrameReport key;
    key.frame = 0;
    key.keyframe = true;
    key.rate_bits = kFrameOverheadBits;
    key.psnr_db = kPsnrCapDb;
    report.frames.push_back(std::move(key));
    if (options.keep_reconstruction) {
      report.reconstruction.push_back(clip.frames[0].luma);
    }
    refs = AdvanceRefs(refs, clip.frames[0].luma);
  }

  for (int t = 1; t < n_frames; ++t) {
    const Plane& source = clip.frames[t].luma;
    Plane reconstruction = BlankLike(source);
    FrameReport frame;
    frame.frame = t;
    frame.blocks.reserve(static_cast<size_t>(cols) * rows);

    const auto start = std::chrono::steady_clock::now();
    BlockContext context;
    context.source = &source;
    context.refs = &refs;
    context.quant = q;
    context.global_motion = EstimateGlobalMotionSet(source, refs);
    for (int by = 0; by < rows; ++by) {
      for (int bx = 0; bx < cols; ++bx) {
        NeighborRecords neighbors;
        if (bx > 0) neighbors.left = &frame.blocks[by * cols + bx - 1];
        if (by > 0) neighbors.top = &frame.blocks[(by - 1) * cols + bx];
        if (bx > 0 && by > 0) {
          neighbors.top_left = &frame.blocks[(by - 1) * cols + bx - 1];
        }
        context.pos = {bx, by};
        context.candidates = BuildCandidates(neighbors);
        const FeatureVector features =
            gated ? ExtractFeatures(neighbors.left, neighbors.top)
                  : FeatureVector{};
        BlockCoding coding = CodeBlock(context, strategy, features);
        StoreBlock(coding.reconstruction, context.pos, reconstruction);
        if (coding.gate) frame.gates.push_back(*coding.gate);
        frame.blocks.push_back(std::move(coding.record));
      }
    }
    frame.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();

    frame.rate_bits = kFrameOverheadBits;
    for (const BlockRecord& r : frame.blocks) {
      frame.rate_bits += r.rate_bits;
      (IsCompound(r.choice) ? report.histogram.crfpm
                            : report.histogram.srfpm) += 1;
    }
    frame.psnr_db = Psnr(source, reconstruction, clip.width, clip.height);
    report.total_wall_time_s += frame.wall_time_s;
    if (options.keep_reconstruction) {
      report.reconstruction.push_back(reconstruction);
    }
    refs = AdvanceRefs(refs, std::move(reconstruction));
    report.frames.push_back(std::move(frame));
  }
  for (const FrameReport& f : report.frames) {
    report.total_rate_bits += f.rate_bits;
  }
  return report;
}

VideoClip ReconstructedClip(const VideoClip& source,
                            const EncodeReport& report) {
  if (report.reconstruction.size() < 2) {
    throw Error("encode report kept no reconstruction");
  }
  VideoClip out = source;
  out.frames.resize(report.reconstruction.size());
  for (size_t i = 0; i < report.reconstruction.size(); ++i) {
    out.frames[i].luma = report.reconstruction[i];
  }
  return out;
}

}  // namespace cgate
