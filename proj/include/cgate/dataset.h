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

#ifndef CGATE_DATASET_H_
#define CGATE_DATASET_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgate/features.h"
#include "cgate/rdo_encoder.h"
#include "cgate/video.h"

namespace cgate {

struct NamedClip {
  std::string id;
  VideoClip clip;
};

constexpr int kDefaultTrainingFrames = 20;

// Labeled samples of every inter block of the frame extracted from an
// exhaustive encode whose block records are in |report|.
std::vector<LabeledSample> SamplesFromReport(const EncodeReport& report,
                                             const std::string& clip_id,
                                             int cols);

// Exhaustive encodes of each clip at each qp over at most |frame_limit|
// frames, one sample per inter block. Encodes run on up to |jobs| threads;
// the result is ordered by (clip id, qp, frame, block row, block column)
// regardless.
std::vector<LabeledSample> Harvest(std::span<const NamedClip> clips,
                                   std::span<const int> qps,
                                   int frame_limit = kDefaultTrainingFrames,
                                   int jobs = 1);

// "clip,qp,frame,bx,by,f1,f2,f3,f4,label".
extern const char kDatasetCsvHeader[];
std::string SerializeDataset(std::span<const LabeledSample> samples);
std::vector<LabeledSample> ParseDataset(std::string_view text);

}  // namespace cgate

#endif  // CGATE_DATASET_H_
