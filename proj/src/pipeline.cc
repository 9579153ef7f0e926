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

#include "cgate/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "cgate/util.h"
#include "json.hpp"

namespace cgate {
namespace {

using json = nlohmann::json;

std::vector<std::string> DataLines(std::string_view text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

template <typename Fn>
void ParallelFor(size_t count, int jobs, Fn&& fn) {
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) fn(i);
  };
  jobs = std::clamp<int>(jobs, 1, std::max<int>(1, count));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& thread : threads) thread.join();
}

}  // namespace

const char kSummaryCsvHeader[] = "clip,strategy,qp,rate_bps,psnr_db,wall_time_s";
const char kRunBlocksCsvHeader[] =
    "clip,qp,frame,block_x,block_y,kind,mode,ref0,ref1,mv0x,mv0y,mv1x,mv1y,"
    "rate_bits,sse,rd_cost";
const char kEvaluationCsvHeader[] = "clip,comparison,bd_br_pct,ts_pct";
const char kModeShareCsvHeader[] = "clip,qp,blocks,srfpm_pct,crfpm_pct";

SyntheticSpec ParseSyntheticSpec(std::string_view text) {
  const auto parts = SplitString(text, ':');
  if (parts.size() != 4) {
    throw Error("synthetic spec must be kind:WxH:frames:seed, got '" +
                std::string(text) + "'");
  }
  SyntheticSpec spec;
  const auto kind = SyntheticKindFromName(parts[0]);
  if (!kind) throw Error("unknown synthetic kind '" + parts[0] + "'");
  spec.kind = *kind;
  const auto size = SplitString(parts[1], 'x');
  if (size.size() != 2) throw Error("synthetic size must be WxH");
  spec.width = ParseInt(size[0]);
  spec.height = ParseInt(size[1]);
  spec.frames = ParseInt(parts[2]);
  spec.seed = static_cast<uint64_t>(std::stoull(parts[3]));
  return spec;
}

std::string SyntheticSpecString(const SyntheticSpec& spec) {
  return StrFormat("%s:%dx%d:%d:%llu", SyntheticKindName(spec.kind), spec.width,
                   spec.height, spec.frames,
                   static_cast<unsigned long long>(spec.seed));
}

void ValidateQps(std::span<const int> qps) {
  if (qps.empty()) throw Error("qp list is empty");
  for (int qp : qps) {
    if (qp < 0 || qp > 63) throw Error(StrFormat("qp %d outside [0, 63]", qp));
  }
}

std::vector<int> ParseQpList(std::string_view text) {
  std::vector<int> qps;
  for (const std::string& part : SplitString(text, ',')) {
    qps.push_back(ParseInt(part));
  }
  ValidateQps(qps);
  return qps;
}

RunManifest ParseManifest(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  RunManifest manifest;
  try {
    for (const json& entry : doc.at("clips")) {
      ClipSource source;
      source.id = entry.value("id", "");
      if (entry.contains("synthetic")) {
        const json& s = entry.at("synthetic");
        SyntheticSpec spec;
        const auto kind = SyntheticKindFromName(s.at("kind").get<std::string>());
        if (!kind) throw Error("unknown synthetic kind");
        spec.kind = *kind;
        spec.width = s.value("width", spec.width);
        spec.height = s.value("height", spec.height);
        spec.frames = s.value("frames", spec.frames);
        spec.seed = s.value("seed", spec.seed);
        source.synthetic = spec;
      } else {
        source.path = entry.at("path").get<std::string>();
        source.raw_width = entry.value("width", 0);
        source.raw_height = entry.value("height", 0);
        source.raw_rate.num = entry.value("fps", 30);
      }
      manifest.clips.push_back(std::move(source));
    }
    if (doc.contains("qps")) manifest.qps = doc.at("qps").get<std::vector<int>>();
    manifest.seed = doc.value("seed", manifest.seed);
    manifest.out_dir = doc.value("out", manifest.out_dir);
    manifest.frames = doc.value("frames", manifest.frames);
    manifest.train_frames = doc.value("train_frames", manifest.train_frames);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  if (manifest.clips.empty()) throw Error("manifest lists no clips");
  ValidateQps(manifest.qps);
  return manifest;
}

NamedClip LoadClip(const ClipSource& source, int frame_limit) {
  const std::optional<int> limit =
      frame_limit > 0 ? std::optional<int>(frame_limit) : std::nullopt;
  NamedClip named;
  if (source.synthetic) {
    const SyntheticSpec& spec = *source.synthetic;
    named.clip = GenSynthetic(spec.kind, spec.width, spec.height, spec.frames,
                              spec.seed);
    if (limit && *limit >= 2 &&
        static_cast<int>(named.clip.frames.size()) > *limit) {
      named.clip.frames.resize(*limit);
    }
    named.id = source.id.empty() ? SyntheticSpecString(spec) : source.id;
    return named;
  }
  if (source.raw_width > 0) {
    named.clip = ReadRawI420(source.path, source.raw_width, source.raw_height,
                             source.raw_rate, limit);
  } else {
    named.clip = ReadY4m(source.path, limit);
  }
  named.id = source.id.empty()
                 ? std::filesystem::path(source.path).stem().string()
                 : source.id;
  return named;
}

SummaryRow SummarizeReport(const std::string& clip_id, const VideoClip& clip,
                           const EncodeReport& report) {
  SummaryRow row;
  row.clip = clip_id;
  row.strategy = report.strategy;
  row.qp = report.qp;
  row.rate_bps = report.InterRateBps(clip.frame_rate);
  row.psnr_db = report.InterPsnrDb();
  row.wall_time_s = report.total_wall_time_s;
  return row;
}

std::string SerializeSummary(std::span<const SummaryRow> rows) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  for (const SummaryRow& r : rows) {
    out += r.clip + "," + r.strategy + "," + std::to_string(r.qp) + "," +
           FormatDouble(r.rate_bps) + "," + FormatDouble(r.psnr_db) + "," +
           StrFormat("%.6f", r.wall_time_s) + "\n";
  }
  return out;
}

std::vector<SummaryRow> ParseSummary(std::string_view text) {
  const auto lines = DataLines(text);
  if (lines.empty() || lines[0] != kSummaryCsvHeader) {
    throw Error(std::string("summary: expected header '") + kSummaryCsvHeader +
                "'");
  }
  std::vector<SummaryRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto f = SplitString(lines[i], ',');
    try {
      if (f.size() != 6) throw Error("expected 6 columns");
      rows.push_back({f[0], f[1], ParseInt(f[2]), ParseDouble(f[3]),
                      ParseDouble(f[4]), ParseDouble(f[5])});
    } catch (const Error& e) {
      throw Error(StrFormat("summary line %zu: %s", i + 1, e.what()));
    }
  }
  return rows;
}

std::string RunBlocksCsvRows(const std::string& clip_id,
                             const EncodeReport& report) {
  std::string out;
  const std::string prefix = clip_id + "," + std::to_string(report.qp) + ",";
  for (const FrameReport& frame : report.frames) {
    for (const BlockRecord& record : frame.blocks) {
      out += prefix + BlockRecordCsvRow(frame.frame, record) + "\n";
    }
  }
  return out;
}

EncodeRunResult RunEncodes(std::span<const NamedClip> clips,
                           std::span<const int> qps, const Strategy& strategy,
                           const EncodeRunOptions& options) {
  ValidateQps(qps);
  struct Task {
    const NamedClip* clip;
    int qp;
    EncodeReport report;
  };
  std::vector<Task> tasks;
  for (const NamedClip& clip : clips) {
    for (int qp : qps) tasks.push_back({&clip, qp, {}});
  }
  EncodeOptions encode_options;
  encode_options.frame_limit = options.frame_limit;
  encode_options.keep_reconstruction = options.keep_reconstruction;
  const auto run = [&](size_t i) {
    Task& task = tasks[i];
    const QuantLevel q = QuantLevel::FromQp(task.qp);
    if (!options.timing) {
      task.report = EncodeClip(task.clip->clip, q, strategy, encode_options);
      return;
    }
    std::vector<double> times;
    for (int rep = 0; rep < kTimingRepetitions; ++rep) {
      EncodeReport report =
          EncodeClip(task.clip->clip, q, strategy, encode_options);
      times.push_back(report.total_wall_time_s);
      if (rep == 0) task.report = std::move(report);
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2,
                     times.end());
    task.report.total_wall_time_s = times[times.size() / 2];
  };
  // Timing runs must not share the machine with sibling encodes.
  ParallelFor(tasks.size(), options.timing ? 1 : options.jobs, run);

  EncodeRunResult result;
  result.blocks_csv = std::string(kRunBlocksCsvHeader) + "\n";
  const bool gated = strategy.kind() == Strategy::Kind::kGated;
  if (gated) result.gates_csv = "clip,qp,frame,block_x,block_y,class\n";
  for (const Task& task : tasks) {
    result.summary.push_back(
        SummarizeReport(task.clip->id, task.clip->clip, task.report));
    result.blocks_csv += RunBlocksCsvRows(task.clip->id, task.report);
    if (gated) {
      for (const FrameReport& frame : task.report.frames) {
        for (size_t i = 0; i < frame.gates.size(); ++i) {
          result.gates_csv += StrFormat(
              "%s,%d,%d,%d,%d,%d\n", task.clip->id.c_str(), task.qp,
              frame.frame, frame.blocks[i].block_x, frame.blocks[i].block_y,
              static_cast<int>(frame.gates[i]));
        }
      }
    }
    if (options.keep_reconstruction) {
      result.reconstructions.emplace_back(
          StrFormat("%s_%s_qp%d", task.clip->id.c_str(),
                    strategy.name().c_str(), task.qp),
          ReconstructedClip(task.clip->clip, task.report));
    }
  }
  return result;
}

std::vector<EvaluationRow> Evaluate(std::span<const SummaryRow> anchor,
                                    std::span<const SummaryRow> test) {
  using Grid = std::map<std::string, std::map<int, const SummaryRow*>>;
  const auto index = [](std::span<const SummaryRow> rows, const char* what) {
    Grid grid;
    for (const SummaryRow& r : rows) {
      if (!grid[r.clip].emplace(r.qp, &r).second) {
        throw Error(StrFormat("%s summary repeats clip %s qp %d", what,
                              r.clip.c_str(), r.qp));
      }
    }
    return grid;
  };
  const Grid a = index(anchor, "anchor");
  const Grid b = index(test, "test");
  if (a.empty()) throw Error("anchor summary is empty");
  if (a.size() != b.size()) throw Error("summaries cover different clips");

  std::vector<EvaluationRow> rows;
  // Clips in order of first appearance in the anchor file.
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const SummaryRow& r : anchor) {
    if (seen.insert(r.clip).second) order.push_back(r.clip);
  }
  for (const std::string& clip : order) {
    const auto& anchor_qps = a.at(clip);
    const auto it = b.find(clip);
    if (it == b.end()) throw Error("test summary lacks clip " + clip);
    const auto& test_qps = it->second;
    if (static_cast<int>(anchor_qps.size()) != RdCurve::kNumPoints) {
      throw Error(StrFormat("clip %s has %zu qps, need %d", clip.c_str(),
                            anchor_qps.size(), RdCurve::kNumPoints));
    }
    std::vector<RdPoint> anchor_points;
    std::vector<RdPoint> test_points;
    double anchor_time = 0.0;
    double test_time = 0.0;
    for (const auto& [qp, row] : anchor_qps) {
      const auto match = test_qps.find(qp);
      if (match == test_qps.end() || test_qps.size() != anchor_qps.size()) {
        throw Error(StrFormat("qp grids differ for clip %s", clip.c_str()));
      }
      anchor_points.push_back({row->rate_bps, row->psnr_db});
      test_points.push_back({match->second->rate_bps, match->second->psnr_db});
      anchor_time += row->wall_time_s;
      test_time += match->second->wall_time_s;
    }
    EvaluationRow out;
    out.clip = clip;
    out.comparison = test_qps.begin()->second->strategy + "_vs_" +
                     anchor_qps.begin()->second->strategy;
    try {
      out.bd_br_pct = BdBr(RdCurve::FromPoints(anchor_points),
                           RdCurve::FromPoints(test_points));
    } catch (const Error& e) {
      throw Error("clip " + clip + ": " + e.what());
    }
    out.ts_pct = TimeSaving(anchor_time, test_time);
    rows.push_back(out);
  }
  EvaluationRow average;
  average.clip = "Average";
  average.comparison = rows.front().comparison;
  for (const EvaluationRow& r : rows) {
    average.bd_br_pct += r.bd_br_pct;
    average.ts_pct += r.ts_pct;
  }
  average.bd_br_pct /= rows.size();
  average.ts_pct /= rows.size();
  rows.push_back(average);
  return rows;
}

std::string SerializeEvaluation(std::span<const EvaluationRow> rows) {
  std::string out = std::string(kEvaluationCsvHeader) + "\n";
  for (const EvaluationRow& r : rows) {
    out += StrFormat("%s,%s,%.4f,%.2f\n", r.clip.c_str(), r.comparison.c_str(),
                     r.bd_br_pct, r.ts_pct);
  }
  return out;
}

std::vector<ModeShareRow> ModeShareStats(std::string_view run_blocks_csv) {
  const auto lines = DataLines(run_blocks_csv);
  if (lines.empty() || lines[0] != kRunBlocksCsvHeader) {
    throw Error(std::string("blocks: expected header '") + kRunBlocksCsvHeader +
                "'");
  }
  struct Counts {
    int srfpm = 0;
    int crfpm = 0;
  };
  std::vector<std::string> clip_order;
  std::map<std::string, std::map<int, Counts>> counts;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitString(lines[i], ',');
    try {
      if (fields.size() != 16) throw Error("expected 16 columns");
      const FramedBlockRecord parsed = ParseBlockRecordCsvRow(fields, 2);
      const int qp = ParseInt(fields[1]);
      if (!counts.count(fields[0])) clip_order.push_back(fields[0]);
      Counts& c = counts[fields[0]][qp];
      (IsCompound(parsed.record.choice) ? c.crfpm : c.srfpm) += 1;
    } catch (const Error& e) {
      throw Error(StrFormat("blocks line %zu: %s", i + 1, e.what()));
    }
  }
  if (counts.empty()) throw Error("blocks file holds no records");
  std::vector<ModeShareRow> rows;
  for (const std::string& clip : clip_order) {
    Counts pooled;
    for (const auto& [qp, c] : counts.at(clip)) {
      rows.push_back({clip, std::to_string(qp), c.srfpm + c.crfpm,
                      ModeShareFromCounts(c.srfpm, c.crfpm)});
      pooled.srfpm += c.srfpm;
      pooled.crfpm += c.crfpm;
    }
    rows.push_back({clip, "pooled", pooled.srfpm + pooled.crfpm,
                    ModeShareFromCounts(pooled.srfpm, pooled.crfpm)});
  }
  return rows;
}

std::string SerializeModeShare(std::span<const ModeShareRow> rows) {
  std::string out = std::string(kModeShareCsvHeader) + "\n";
  for (const ModeShareRow& r : rows) {
    out += StrFormat("%s,%s,%d,%.4f,%.4f\n", r.clip.c_str(), r.qp.c_str(),
                     r.blocks, r.share.srfpm_pct, r.share.crfpm_pct);
  }
  return out;
}

TrainResult TrainGate(std::span<const LabeledSample> dataset,
                      const TrainOptions& options) {
  ValidateTrainConfig(options.config);
  if (dataset.empty()) throw Error("training dataset is empty");
  TrainResult result;
  const std::vector<LabeledSample> balanced =
      BalancedSample(dataset, options.per_class_cap, options.config.rng_seed,
                     &result.balance);
  if (balanced.empty()) {
    throw Error("no clip contributes both classes; cannot train");
  }

  std::vector<std::string> clips;
  for (const ClipBalance& b : result.balance) {
    if (b.m > 0) clips.push_back(b.clip_id);
  }
  // Seeded Fisher-Yates over the contributing clips.
  std::mt19937_64 rng(options.config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  for (size_t i = clips.size(); i > 1; --i) {
    std::swap(clips[i - 1], clips[UniformBelow(rng, i)]);
  }
  const size_t n_holdout =
      clips.size() < 2
          ? 0
          : std::max<size_t>(1, static_cast<size_t>(std::lround(
                                    kHoldoutFraction * clips.size())));
  const std::set<std::string> holdout(clips.begin(),
                                      clips.begin() + n_holdout);
  result.holdout_clips.assign(holdout.begin(), holdout.end());

  std::vector<LabeledSample> train;
  for (const LabeledSample& s : balanced) {
    if (!holdout.count(s.clip_id)) train.push_back(s);
  }
  // Threshold tuning sees the holdout clips at their natural class mix.
  std::set<std::string> tune_clips = holdout;
  if (tune_clips.empty()) tune_clips.insert(clips.begin(), clips.end());
  std::vector<LabeledSample> tune;
  for (const LabeledSample& s : dataset) {
    if (tune_clips.count(s.clip_id)) tune.push_back(s);
  }

  result.train_samples = static_cast<int>(train.size());
  for (const LabeledSample& s : train) {
    result.train_class1 += s.label == Label::kClass1;
  }
  result.holdout_samples = static_cast<int>(tune.size());
  const DecisionTree tree = TrainTree(train, options.config);
  result.model =
      TuneThreshold(tree, tune, options.config.target_class0_precision);
  result.holdout_class0_precision = Class0Precision(result.model, tune);
  result.holdout_class1_recall = Class1Recall(result.model, tune);
  return result;
}

std::string TrainResult::Report() const {
  std::string out;
  for (const ClipBalance& b : balance) {
    out += StrFormat("clip %s class0=%d class1=%d p0=%.4f M=%d%s\n",
                     b.clip_id.c_str(), b.class0_available, b.class1_available,
                     b.p0, b.m, b.m == 0 ? " (skipped: single class)" : "");
  }
  const double class1_pct =
      train_samples ? 100.0 * train_class1 / train_samples : 0.0;
  out += StrFormat("train_samples %d\n", train_samples);
  out += StrFormat("class_balance class0=%.2f%% class1=%.2f%%\n",
                   100.0 - class1_pct, class1_pct);
  out += "holdout_clips";
  for (const std::string& clip : holdout_clips) out += " " + clip;
  if (holdout_clips.empty()) out += " (none; tuned on training clips)";
  out += "\n";
  out += StrFormat("holdout_samples %d\n", holdout_samples);
  out += StrFormat("holdout_class0_precision %.4f\n", holdout_class0_precision);
  out += StrFormat("holdout_class1_recall %.4f\n", holdout_class1_recall);
  out += "tau " + FormatDouble(model.tau) + "\n";
  out += StrFormat("tree_depth %d\ntree_leaves %d\n", model.tree.Depth(),
                   model.tree.LeafCount());
  return out;
}

}  // namespace cgate
