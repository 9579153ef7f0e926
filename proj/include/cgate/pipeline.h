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

#ifndef CGATE_PIPELINE_H_
#define CGATE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgate/dataset.h"
#include "cgate/dtree.h"
#include "cgate/metrics.h"
#include "cgate/rdo_encoder.h"
#include "cgate/video.h"

namespace cgate {

inline const std::vector<int> kDefaultQps = {32, 43, 55, 63};
constexpr int kTimingRepetitions = 3;
constexpr int kDefaultPerClassCap = 5000;
constexpr double kHoldoutFraction = 0.2;

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kStatic;
  int width = 64;
  int height = 64;
  int frames = 8;
  uint64_t seed = 1;
};

// "kind:WxH:frames:seed".
SyntheticSpec ParseSyntheticSpec(std::string_view text);
std::string SyntheticSpecString(const SyntheticSpec& spec);

// Where one clip of a run comes from.
struct ClipSource {
  std::string id;
  std::string path;  // .y4m, or raw I420 when raw_width > 0
  std::optional<SyntheticSpec> synthetic;
  int raw_width = 0;
  int raw_height = 0;
  FrameRate raw_rate;
};

struct RunManifest {
  std::vector<ClipSource> clips;
  std::vector<int> qps = kDefaultQps;
  uint64_t seed = 1;
  std::string out_dir = ".";
  int frames = 0;  // 0 = whole clip
  int train_frames = kDefaultTrainingFrames;
};

void ValidateQps(std::span<const int> qps);
std::vector<int> ParseQpList(std::string_view text);

// JSON manifest: {"clips": [{"id", "path" | "synthetic": {...}}], "qps",
// "seed", "out", "frames", "train_frames"}.
RunManifest ParseManifest(std::string_view json_text);

// Clip id defaults to the file stem or the synthetic spec string.
NamedClip LoadClip(const ClipSource& source, int frame_limit = 0);

struct SummaryRow {
  std::string clip;
  std::string strategy;
  int qp = 0;
  double rate_bps = 0.0;
  double psnr_db = 0.0;
  double wall_time_s = 0.0;
};

extern const char kSummaryCsvHeader[];
SummaryRow SummarizeReport(const std::string& clip_id, const VideoClip& clip,
                           const EncodeReport& report);
std::string SerializeSummary(std::span<const SummaryRow> rows);
std::vector<SummaryRow> ParseSummary(std::string_view text);

// Block CSV of an encode run: "clip,qp," followed by the block record
// columns.
extern const char kRunBlocksCsvHeader[];
std::string RunBlocksCsvRows(const std::string& clip_id, const EncodeReport& report);

struct EncodeRunOptions {
  int frame_limit = 0;
  // Sequential encodes, wall time = median of kTimingRepetitions runs.
  bool timing = false;
  int jobs = 1;
  bool keep_reconstruction = false;
};

struct EncodeRunResult {
  std::vector<SummaryRow> summary;
  std::string blocks_csv;
  std::string gates_csv;  // gated strategy only
  std::vector<std::pair<std::string, VideoClip>> reconstructions;
};

EncodeRunResult RunEncodes(std::span<const NamedClip> clips,
                           std::span<const int> qps, const Strategy& strategy,
                           const EncodeRunOptions& options);

struct EvaluationRow {
  std::string clip;
  std::string comparison;
  double bd_br_pct = 0.0;
  double ts_pct = 0.0;
};

extern const char kEvaluationCsvHeader[];
// Per-clip BD-BR and time saving of |test| against |anchor| plus an
// "Average" row. Both summaries must cover the same clips with four qps each.
std::vector<EvaluationRow> Evaluate(std::span<const SummaryRow> anchor,
                                    std::span<const SummaryRow> test);
std::string SerializeEvaluation(std::span<const EvaluationRow> rows);

struct ModeShareRow {
  std::string clip;
  std::string qp;  // number or "pooled"
  int blocks = 0;
  ModeShare share;
};

extern const char kModeShareCsvHeader[];
std::vector<ModeShareRow> ModeShareStats(std::string_view run_blocks_csv);
std::string SerializeModeShare(std::span<const ModeShareRow> rows);

struct TrainOptions {
  TrainConfig config;
  int per_class_cap = kDefaultPerClassCap;
};

struct TrainResult {
  GateModel model;
  std::vector<ClipBalance> balance;
  std::vector<std::string> holdout_clips;
  int train_samples = 0;
  int train_class1 = 0;
  int holdout_samples = 0;
  double holdout_class0_precision = -1.0;
  double holdout_class1_recall = -1.0;

  std::string Report() const;
};

// Balance per clip, hold out 20% of the clips (seeded), train, then tune tau
// on the held-out clips. With a single clip the holdout is the training set.
TrainResult TrainGate(std::span<const LabeledSample> dataset,
                      const TrainOptions& options);

}  // namespace cgate

#endif  // CGATE_PIPELINE_H_
