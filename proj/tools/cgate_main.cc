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

// Command-line driver: gen, encode, extract, train, evaluate, stats.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cgate/dataset.h"
#include "cgate/dtree.h"
#include "cgate/pipeline.h"
#include "cgate/rdo_encoder.h"
#include "cgate/util.h"
#include "cgate/video.h"

namespace {

using namespace cgate;

constexpr char kCsvHelp[] = R"(CSV files (UTF-8, comma separated, LF terminated, header row first):
  summary   clip,strategy,qp,rate_bps,psnr_db,wall_time_s
  blocks    clip,qp,frame,block_x,block_y,kind,mode,ref0,ref1,mv0x,mv0y,mv1x,mv1y,rate_bits,sse,rd_cost
  gates     clip,qp,frame,block_x,block_y,class
  dataset   clip,qp,frame,bx,by,f1,f2,f3,f4,label
  evaluate  clip,comparison,bd_br_pct,ts_pct
  stats     clip,qp,blocks,srfpm_pct,crfpm_pct
Dataset feature codes:
  f1,f3  second reference of the left/upper block: 0 LAST 1 LAST2 2 LAST3
         3 GOLDEN 4 BWDREF 5 ALTREF 6 ALTREF2 7 NONE
  f2,f4  mode of the left/upper block: 0 NEARESTMV 1 NEARMV 2 NEWMV
         3 GLOBALMV 4 NEAREST_NEARESTMV 5 NEAR_NEARMV 6 NEAREST_NEWMV
         7 NEW_NEARESTMV 8 NEAR_NEWMV 9 NEW_NEARMV 10 GLOBAL_GLOBALMV
         11 NEW_NEWMV 12 no block
  label  0 = single reference best, 1 = compound best)";

// Clip inputs shared by encode and extract.
struct InputFlags {
  std::vector<std::string> paths;
  std::vector<std::string> synthetic;
  std::string manifest;
  int width = 0;
  int height = 0;
  int fps = 30;

  void Register(CLI::App* app) {
    app->add_option("inputs", paths, "Y4M (or raw .yuv with --width/--height) clips");
    app->add_option("--synthetic", synthetic,
                    "Synthetic clip kind:WxH:frames:seed (repeatable)")
        ->allow_extra_args(false);
    app->add_option("--manifest", manifest, "JSON run manifest");
    app->add_option("--width", width, "Raw input width");
    app->add_option("--height", height, "Raw input height");
    app->add_option("--fps", fps, "Raw input frame rate");
  }

  std::vector<ClipSource> Sources(const RunManifest* manifest_out) const {
    std::vector<ClipSource> sources;
    if (manifest_out) sources = manifest_out->clips;
    for (const std::string& path : paths) {
      ClipSource source;
      source.path = path;
      if (std::filesystem::path(path).extension() == ".yuv") {
        if (width <= 0 || height <= 0) {
          throw Error("raw input " + path + " needs --width and --height");
        }
        source.raw_width = width;
        source.raw_height = height;
        source.raw_rate = {fps, 1};
      }
      sources.push_back(source);
    }
    for (const std::string& spec : synthetic) {
      ClipSource source;
      source.synthetic = ParseSyntheticSpec(spec);
      sources.push_back(source);
    }
    if (sources.empty()) throw Error("no input clips given");
    return sources;
  }
};

std::vector<NamedClip> LoadAll(const std::vector<ClipSource>& sources,
                               int frame_limit) {
  std::vector<NamedClip> clips;
  for (const ClipSource& source : sources) {
    clips.push_back(LoadClip(source, frame_limit));
  }
  return clips;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int DefaultJobs() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound-reference mode gating harness", "cgate"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic Y4M clip");
  std::string gen_kind = "two_layer_parallax";
  std::string gen_size = "64x64";
  int gen_frames = 8;
  uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--kind", gen_kind,
                  "global_pan | two_layer_parallax | noise | static");
  gen->add_option("--size", gen_size, "WxH");
  gen->add_option("--frames", gen_frames, "Frame count (>= 2)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("-o,--out", gen_out, "Output .y4m")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "Encode clips at each qp");
  InputFlags encode_inputs;
  encode_inputs.Register(encode);
  std::string strategy_name = "exhaustive";
  std::string model_path;
  std::string encode_qps;
  int encode_frames = 0;
  bool timing = false;
  bool write_recon = false;
  std::string out_dir;
  int jobs = DefaultJobs();
  encode->add_option("--strategy", strategy_name, "exhaustive | skip | gated")
      ->check(CLI::IsMember({"exhaustive", "skip", "gated"}));
  encode->add_option("--model", model_path, "Gate model (gated strategy)");
  encode->add_option("--qps", encode_qps, "Comma separated qps");
  encode->add_option("--frames", encode_frames, "Frames per clip (0 = all)");
  encode->add_flag("--timing", timing,
                   "Sequential encodes, wall time = median of 3 runs");
  encode->add_flag("--recon", write_recon, "Also write reconstructed Y4M");
  encode->add_option("--out", out_dir, "Output directory");
  encode->add_option("--jobs", jobs, "Parallel encodes when not timing");

  // extract
  auto* extract = app.add_subcommand("extract", "Harvest a training dataset");
  InputFlags extract_inputs;
  extract_inputs.Register(extract);
  std::string extract_qps;
  int extract_frames = kDefaultTrainingFrames;
  std::string dataset_out;
  extract->add_option("--qps", extract_qps, "Comma separated qps");
  extract->add_option("--frames", extract_frames, "Frames per clip");
  extract->add_option("-o,--out", dataset_out, "Dataset CSV")->required();
  extract->add_option("--jobs", jobs, "Parallel encodes");

  // train
  auto* train = app.add_subcommand("train", "Train and tune the gate");
  std::string dataset_in;
  std::string model_out;
  std::string report_out;
  TrainOptions train_options;
  train->add_option("dataset", dataset_in, "Dataset CSV")->required();
  train->add_option("-o,--model", model_out, "Model file to write")->required();
  train->add_option("--report", report_out, "Training report file");
  train->add_option("--max-depth", train_options.config.max_depth);
  train->add_option("--min-leaf", train_options.config.min_leaf);
  train->add_option("--min-gain", train_options.config.min_gini_gain);
  train->add_option("--seed", train_options.config.rng_seed);
  train->add_option("--target", train_options.config.target_class0_precision,
                    "Holdout Class0 precision target");
  train->add_option("--per-class", train_options.per_class_cap,
                    "N, per-class sample cap per clip");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "BD-BR and time saving");
  std::string anchor_in;
  std::vector<std::string> test_in;
  std::string eval_out;
  evaluate->add_option("anchor", anchor_in, "Anchor summary CSV")->required();
  evaluate->add_option("tests", test_in, "Test summary CSVs")->required();
  evaluate->add_option("-o,--out", eval_out, "Evaluation CSV (default stdout)");

  // stats
  auto* stats = app.add_subcommand("stats", "SRFPM/CRFPM mode shares");
  std::string blocks_in;
  std::string stats_out;
  stats->add_option("blocks", blocks_in, "Blocks CSV")->required();
  stats->add_option("-o,--out", stats_out, "Mode-share CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*gen) {
      const auto kind = SyntheticKindFromName(gen_kind);
      if (!kind) throw Error("unknown synthetic kind '" + gen_kind + "'");
      const auto size = SplitString(gen_size, 'x');
      if (size.size() != 2) throw Error("--size must be WxH");
      const VideoClip clip = GenSynthetic(*kind, ParseInt(size[0]),
                                          ParseInt(size[1]), gen_frames,
                                          gen_seed);
      WriteY4m(clip, gen_out);
      std::cout << "wrote " << gen_out << "\n";
    } else if (*encode) {
      std::optional<RunManifest> manifest;
      if (!encode_inputs.manifest.empty()) {
        manifest = ParseManifest(ReadFile(encode_inputs.manifest));
      }
      std::vector<int> qps = manifest ? manifest->qps : kDefaultQps;
      if (!encode_qps.empty()) qps = ParseQpList(encode_qps);
      if (out_dir.empty()) out_dir = manifest ? manifest->out_dir : ".";
      if (encode_frames == 0 && manifest) encode_frames = manifest->frames;
      Strategy strategy = Strategy::Exhaustive();
      if (strategy_name == "skip") {
        strategy = Strategy::SkipCompound();
      } else if (strategy_name == "gated") {
        if (model_path.empty()) throw Error("--strategy gated needs --model");
        strategy = Strategy::Gated(
            std::make_shared<const GateModel>(ReadGateModel(model_path)));
      }
      const auto clips = LoadAll(
          encode_inputs.Sources(manifest ? &*manifest : nullptr), encode_frames);
      EncodeRunOptions options;
      options.frame_limit = encode_frames;
      options.timing = timing;
      options.jobs = jobs;
      options.keep_reconstruction = write_recon;
      const EncodeRunResult result = RunEncodes(clips, qps, strategy, options);
      std::filesystem::create_directories(out_dir);
      const std::string prefix = JoinPath(out_dir, strategy.name());
      WriteFile(prefix + "_summary.csv", SerializeSummary(result.summary));
      WriteFile(prefix + "_blocks.csv", result.blocks_csv);
      std::cout << "wrote " << prefix << "_summary.csv\n"
                << "wrote " << prefix << "_blocks.csv\n";
      if (!result.gates_csv.empty()) {
        WriteFile(prefix + "_gates.csv", result.gates_csv);
        std::cout << "wrote " << prefix << "_gates.csv\n";
      }
      for (const auto& [name, clip] : result.reconstructions) {
        WriteY4m(clip, JoinPath(out_dir, name + ".y4m"));
      }
    } else if (*extract) {
      std::optional<RunManifest> manifest;
      if (!extract_inputs.manifest.empty()) {
        manifest = ParseManifest(ReadFile(extract_inputs.manifest));
        if (!extract->count("--frames")) extract_frames = manifest->train_frames;
      }
      std::vector<int> qps = manifest ? manifest->qps : kDefaultQps;
      if (!extract_qps.empty()) qps = ParseQpList(extract_qps);
      const auto clips =
          LoadAll(extract_inputs.Sources(manifest ? &*manifest : nullptr),
                  extract_frames);
      const auto samples = Harvest(clips, qps, extract_frames, jobs);
      WriteFile(dataset_out, SerializeDataset(samples));
      std::cout << "wrote " << samples.size() << " samples to " << dataset_out
                << "\n";
    } else if (*train) {
      const auto dataset = ParseDataset(ReadFile(dataset_in));
      const TrainResult result = TrainGate(dataset, train_options);
      for (const ClipBalance& b : result.balance) {
        if (b.m == 0) {
          std::cerr << "cgate train: warning: clip " << b.clip_id
                    << " lacks a class and contributes no samples\n";
        }
      }
      WriteGateModel(result.model, model_out);
      const std::string report = result.Report();
      if (!report_out.empty()) WriteFile(report_out, report);
      std::cout << report << "wrote " << model_out << "\n";
    } else if (*evaluate) {
      const auto anchor = ParseSummary(ReadFile(anchor_in));
      std::vector<EvaluationRow> rows;
      for (const std::string& path : test_in) {
        const auto test = ParseSummary(ReadFile(path));
        const auto part = Evaluate(anchor, test);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const std::string csv = SerializeEvaluation(rows);
      if (eval_out.empty()) {
        std::cout << csv;
      } else {
        WriteFile(eval_out, csv);
        std::cout << "wrote " << eval_out << "\n";
      }
    } else if (*stats) {
      const std::string csv =
          SerializeModeShare(ModeShareStats(ReadFile(blocks_in)));
      if (stats_out.empty()) {
        std::cout << csv;
      } else {
        WriteFile(stats_out, csv);
        std::cout << "wrote " << stats_out << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "cgate " << stage << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
