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

#ifndef CGATE_RDO_ENCODER_H_
#define CGATE_RDO_ENCODER_H_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cgate/codec.h"
#include "cgate/dtree.h"
#include "cgate/features.h"
#include "cgate/inter_predict.h"
#include "cgate/video.h"

namespace cgate {

// Constant added to every coded frame's rate.
constexpr double kFrameOverheadBits = 64.0;
constexpr double kSingleModeBits = 3.0;
constexpr double kCompoundModeBits = 5.0;
constexpr double kZeroCoefficientBits = 0.02;

using Coefficients = std::array<int, kBlockArea>;

class Strategy {
 public:
  enum class Kind { kExhaustive, kSkipCompound, kGated };

  static Strategy Exhaustive() { return Strategy(Kind::kExhaustive, nullptr); }
  static Strategy SkipCompound() {
    return Strategy(Kind::kSkipCompound, nullptr);
  }
  static Strategy Gated(std::shared_ptr<const GateModel> model);

  Kind kind() const { return kind_; }
  const GateModel* model() const { return model_.get(); }
  std::string name() const;

 private:
  Strategy(Kind kind, std::shared_ptr<const GateModel> model)
      : kind_(kind), model_(std::move(model)) {}

  Kind kind_;
  std::shared_ptr<const GateModel> model_;
};

struct QuantizedResidual {
  Coefficients levels{};
  Coefficients dequantized{};
};

// Dead-zone quantiser: q = sign(r) * floor(|r| / qstep), r' = q * round(qstep).
QuantizedResidual QuantizeResidual(const Coefficients& residual, double qstep);

// mode bits + NEWMV component MV bits + residual bits.
double RateOfBlock(const ModeChoice& choice, const Coefficients& levels,
                   const MvCandidateSet& candidates);

// Everything CodeBlock needs about the current block besides the strategy.
struct BlockContext {
  BlockPosition pos;
  const Plane* source = nullptr;
  const RefBuffer* refs = nullptr;
  MvCandidateSet candidates;
  GlobalMotion global_motion;
  QuantLevel quant;
};

struct BlockCoding {
  BlockRecord record;
  Block reconstruction{};
  // Set for gated coding only.
  std::optional<Label> gate;
};

// Minimum-RD-cost choice over the single modes of every present slot and,
// when |test_compound|, the compound modes over the restricted pairs.
BlockCoding CodeBlock(const BlockContext& context, bool test_compound);

// Applies |strategy| to decide on compound testing, then codes the block.
BlockCoding CodeBlock(const BlockContext& context, const Strategy& strategy,
                      const FeatureVector& features);

// Compound pairs searched for the given buffer, in evaluation order.
std::vector<std::pair<ReferenceSlot, ReferenceSlot>> CompoundPairs(
    const RefBuffer& refs);

struct ModeHistogram {
  int srfpm = 0;
  int crfpm = 0;

  int total() const { return srfpm + crfpm; }
};

struct FrameReport {
  int frame = 0;
  bool keyframe = false;
  double rate_bits = 0.0;
  double psnr_db = 0.0;
  double wall_time_s = 0.0;
  std::vector<BlockRecord> blocks;
  std::vector<Label> gates;  // gated strategy only, raster order
};

struct EncodeReport {
  std::string strategy;
  int qp = 0;
  std::vector<FrameReport> frames;
  ModeHistogram histogram;
  double total_rate_bits = 0.0;
  double total_wall_time_s = 0.0;
  std::vector<Plane> reconstruction;  // padded luma per frame

  int InterFrameCount() const;
  // Bits per second over the inter frames.
  double InterRateBps(const FrameRate& rate) const;
  // Mean luma PSNR over the inter frames.
  double InterPsnrDb() const;
};

struct EncodeOptions {
  int frame_limit = 0;  // 0 = whole clip
  bool keep_reconstruction = false;
};

// Frame 0 is a keyframe reconstructed losslessly at no cost; every other
// frame is inter coded in block raster order.
EncodeReport EncodeClip(const VideoClip& clip, const QuantLevel& q,
                        const Strategy& strategy,
                        const EncodeOptions& options = {});

// The reconstructed clip with the source chroma, for inspection.
VideoClip ReconstructedClip(const VideoClip& source,
                            const EncodeReport& report);

}  // namespace cgate

#endif  // CGATE_RDO_ENCODER_H_
