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

#include "cgate/dataset.h"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include "cgate/util.h"

namespace cgate {

const char kDatasetCsvHeader[] = "clip,qp,frame,bx,by,f1,f2,f3,f4,label";

std::vector<LabeledSample> SamplesFromReport(const EncodeReport& report,
                                             const std::string& clip_id,
                                             int cols) {
  std::vector<LabeledSample> samples;
  for (const FrameReport& frame : report.frames) {
    if (frame.keyframe) continue;
    for (size_t i = 0; i < frame.blocks.size(); ++i) {
      const BlockRecord& record = frame.blocks[i];
      const BlockRecord* left =
          record.block_x > 0 ? &frame.blocks[i - 1] : nullptr;
      const BlockRecord* top =
          record.block_y > 0 ? &frame.blocks[i - cols] : nullptr;
      LabeledSample sample;
      sample.features = ExtractFeatures(left, top);
      sample.label = LabelBlock(record);
      sample.clip_id = clip_id;
      sample.qp = report.qp;
      sample.frame = frame.frame;
      sample.block_x = record.block_x;
      sample.block_y = record.block_y;
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

std::vector<LabeledSample> Harvest(std::span<const NamedClip> clips,
                                   std::span<const int> qps, int frame_limit,
                                   int jobs) {
  if (clips.empty()) throw Error("harvest needs at least one clip");
  if (qps.empty()) throw Error("harvest needs at least one qp");
  struct Task {
    const NamedClip* clip;
    int qp;
    std::vector<LabeledSample> samples;
  };
  std::vector<Task> tasks;
  for (const NamedClip& clip : clips) {
    for (int qp : qps) tasks.push_back({&clip, qp, {}});
  }
  const Strategy exhaustive = Strategy::Exhaustive();
  EncodeOptions options;
  options.frame_limit = frame_limit;
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      Task& task = tasks[i];
      const EncodeReport report = EncodeClip(
          task.clip->clip, QuantLevel::FromQp(task.qp), exhaustive, options);
      task.samples = SamplesFromReport(
          report, task.clip->id, task.clip->clip.padded_width / kBlockSize);
    }
  };
  jobs = std::clamp<int>(jobs, 1, static_cast<int>(tasks.size()));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& thread : threads) thread.join();

  std::vector<LabeledSample> samples;
  for (Task& task : tasks) {
    for (LabeledSample& s : task.samples) samples.push_back(std::move(s));
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const LabeledSample& a, const LabeledSample& b) {
                     return std::tie(a.clip_id, a.qp, a.frame, a.block_y,
                                     a.block_x) <
                            std::tie(b.clip_id, b.qp, b.frame, b.block_y,
                                     b.block_x);
                   });
  return samples;
}

std::string SerializeDataset(std::span<const LabeledSample> samples) {
  std::string out = std::string(kDatasetCsvHeader) + "\n";
  for (const LabeledSample& s : samples) {
    out += StrFormat("%s,%d,%d,%d,%d,%d,%d,%d,%d,%d\n", s.clip_id.c_str(),
                     s.qp, s.frame, s.block_x, s.block_y, s.features.Value(0),
                     s.features.Value(1), s.features.Value(2),
                     s.features.Value(3), static_cast<int>(s.label));
  }
  return out;
}

std::vector<LabeledSample> ParseDataset(std::string_view text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kDatasetCsvHeader) {
    throw Error(std::string("dataset: expected header '") + kDatasetCsvHeader +
                "'");
  }
  std::vector<LabeledSample> samples;
  samples.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitString(lines[i], ',');
    try {
      if (fields.size() != 10) throw Error("expected 10 columns");
      LabeledSample s;
      s.clip_id = fields[0];
      s.qp = ParseInt(fields[1]);
      s.frame = ParseInt(fields[2]);
      s.block_x = ParseInt(fields[3]);
      s.block_y = ParseInt(fields[4]);
      s.features = FeatureVectorFromValues(
          {ParseInt(fields[5]), ParseInt(fields[6]), ParseInt(fields[7]),
           ParseInt(fields[8])});
      const int label = ParseInt(fields[9]);
      if (label != 0 && label != 1) throw Error("label must be 0 or 1");
      s.label = static_cast<Label>(label);
      samples.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error(StrFormat("dataset line %zu: %s", i + 1, e.what()));
    }
  }
  return samples;
}

}  // namespace cgate
