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

#include "cgate/dtree.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <utility>

#include "cgate/util.h"

namespace cgate {
namespace {

constexpr int kMaxCardinality = kNumModeIds;

struct ClassCounts {
  int n = 0;
  int n1 = 0;
};

double GainFromCounts(ClassCounts parent, ClassCounts equal) {
  const ClassCounts other{parent.n - equal.n, parent.n1 - equal.n1};
  const double n = parent.n;
  return Gini(parent.n1 / n) -
         (equal.n / n * Gini(static_cast<double>(equal.n1) / equal.n) +
          other.n / n * Gini(static_cast<double>(other.n1) / other.n));
}

using CountTable = std::array<std::array<ClassCounts, kMaxCardinality>,
                              kNumFeatures>;

template <typename SampleAt>
Split BestSplitFromCounts(int n_samples, SampleAt&& sample_at, int min_leaf) {
  CountTable table{};
  ClassCounts parent{n_samples, 0};
  for (int i = 0; i < n_samples; ++i) {
    const LabeledSample& s = sample_at(i);
    const int is1 = s.label == Label::kClass1 ? 1 : 0;
    parent.n1 += is1;
    for (int f = 0; f < kNumFeatures; ++f) {
      ClassCounts& c = table[f][s.features.Value(f)];
      ++c.n;
      c.n1 += is1;
    }
  }
  Split best{-1, 0, 0.0};
  for (int f = 0; f < kNumFeatures; ++f) {
    for (int v = 0; v < kFeatureCardinality[f]; ++v) {
      const ClassCounts& equal = table[f][v];
      if (equal.n == 0 || equal.n == n_samples) continue;
      if (equal.n < min_leaf || n_samples - equal.n < min_leaf) continue;
      const double gain = GainFromCounts(parent, equal);
      if (best.feature < 0 || gain > best.gain) best = {f, v, gain};
    }
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledSample> dataset, const TrainConfig& config)
      : dataset_(dataset), config_(config) {}

  std::vector<DecisionTree::Node> Build() {
    std::vector<int> all(dataset_.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    Grow(all, 0);
    return std::move(nodes_);
  }

 private:
  int Grow(const std::vector<int>& indices, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    int n1 = 0;
    for (int i : indices) n1 += dataset_[i].label == Label::kClass1;
    const int n = static_cast<int>(indices.size());

    Split split{-1, 0, 0.0};
    if (depth < config_.max_depth && n1 > 0 && n1 < n) {
      split = BestSplitFromCounts(
          n, [&](int i) -> const LabeledSample& { return dataset_[indices[i]]; },
          config_.min_leaf);
    }
    if (split.feature < 0 || split.gain <= 0.0 ||
        split.gain < config_.min_gini_gain) {
      DecisionTree::Node& leaf = nodes_[index];
      leaf.is_leaf = true;
      leaf.p_class1 = static_cast<double>(n1) / n;
      leaf.n_samples = n;
      return index;
    }

    std::vector<int> equal;
    std::vector<int> other;
    for (int i : indices) {
      (dataset_[i].features.Value(split.feature) == split.value ? equal : other)
          .push_back(i);
    }
    nodes_[index].is_leaf = false;
    nodes_[index].feature = split.feature;
    nodes_[index].value = split.value;
    const int equal_child = Grow(equal, depth + 1);
    const int other_child = Grow(other, depth + 1);
    nodes_[index].equal_child = equal_child;
    nodes_[index].other_child = other_child;
    return index;
  }

  std::span<const LabeledSample> dataset_;
  const TrainConfig& config_;
  std::vector<DecisionTree::Node> nodes_;
};

int DepthFrom(const std::vector<DecisionTree::Node>& nodes, int index) {
  const auto& node = nodes[index];
  if (node.is_leaf) return 0;
  return 1 + std::max(DepthFrom(nodes, node.equal_child),
                      DepthFrom(nodes, node.other_child));
}

}  // namespace

double Gini(double p_class1) {
  if (!(p_class1 >= 0.0 && p_class1 <= 1.0)) {
    throw Error(StrFormat("gini: probability %g outside [0, 1]", p_class1));
  }
  // Sum over both classes of P * (1 - P).
  const double p0 = 1.0 - p_class1;
  return p_class1 * (1.0 - p_class1) + p0 * (1.0 - p0);
}

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.max_depth < 1) throw Error("max_depth must be >= 1");
  if (config.min_leaf < 1) throw Error("min_leaf must be >= 1");
  if (!(config.target_class0_precision > 0.0 &&
        config.target_class0_precision < 1.0)) {
    throw Error("target Class0 precision must lie in (0, 1)");
  }
}

double SplitGain(std::span<const LabeledSample> samples, int feature,
                 int value) {
  ClassCounts parent{static_cast<int>(samples.size()), 0};
  ClassCounts equal;
  for (const LabeledSample& s : samples) {
    const int is1 = s.label == Label::kClass1;
    parent.n1 += is1;
    if (s.features.Value(feature) == value) {
      ++equal.n;
      equal.n1 += is1;
    }
  }
  if (equal.n == 0 || equal.n == parent.n) return 0.0;
  return GainFromCounts(parent, equal);
}

Split FindBestSplit(std::span<const LabeledSample> samples, int min_leaf) {
  return BestSplitFromCounts(
      static_cast<int>(samples.size()),
      [&](int i) -> const LabeledSample& { return samples[i]; }, min_leaf);
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error("decision tree needs at least one node");
}

DecisionTree DecisionTree::Leaf(double p_class1, int n_samples) {
  Node leaf;
  leaf.p_class1 = p_class1;
  leaf.n_samples = n_samples;
  return DecisionTree({leaf});
}

int DecisionTree::Depth() const { return DepthFrom(nodes_, 0); }

int DecisionTree::LeafCount() const {
  return static_cast<int>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf; }));
}

DecisionTree TrainTree(std::span<const LabeledSample> dataset,
                       const TrainConfig& config) {
  ValidateTrainConfig(config);
  const auto n1 = std::count_if(dataset.begin(), dataset.end(),
                                [](const LabeledSample& s) {
                                  return s.label == Label::kClass1;
                                });
  if (n1 == 0 || n1 == static_cast<long>(dataset.size())) {
    throw Error("training needs samples of both classes");
  }
  return DecisionTree(TreeBuilder(dataset, config).Build());
}

double Class0Precision(const GateModel& model,
                       std::span<const LabeledSample> samples) {
  int predicted = 0;
  int correct = 0;
  for (const LabeledSample& s : samples) {
    if (model.Classify(s.features) == Label::kClass0) {
      ++predicted;
      correct += s.label == Label::kClass0;
    }
  }
  return predicted == 0 ? -1.0 : static_cast<double>(correct) / predicted;
}

double Class1Recall(const GateModel& model,
                    std::span<const LabeledSample> samples) {
  int positives = 0;
  int found = 0;
  for (const LabeledSample& s : samples) {
    if (s.label != Label::kClass1) continue;
    ++positives;
    found += model.Classify(s.features) == Label::kClass1;
  }
  return positives == 0 ? -1.0 : static_cast<double>(found) / positives;
}

GateModel TuneThreshold(const DecisionTree& tree,
                        std::span<const LabeledSample> holdout,
                        double target_class0_precision) {
  std::vector<double> candidates = {0.0, 1.0};
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf) candidates.push_back(node.p_class1);
  }
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (double tau : candidates) {
    const GateModel model{tree, tau};
    if (Class0Precision(model, holdout) >= target_class0_precision) {
      return model;
    }
  }
  return GateModel{tree, 0.0};
}

int BalancedSampleCount(double p0, int per_class_cap) {
  if (per_class_cap <= 0) throw Error("per-class sample cap must be positive");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw Error("p0 outside [0, 1]");
  const double minority_share = p0 < 0.5 ? p0 : 1.0 - p0;
  const int m = static_cast<int>(std::floor(minority_share * per_class_cap));
  return std::max(m, 1);
}

std::vector<LabeledSample> BalancedSample(
    std::span<const LabeledSample> samples, int per_class_cap, uint64_t seed,
    std::vector<ClipBalance>* report) {
  if (per_class_cap <= 0) throw Error("per-class sample cap must be positive");
  std::map<std::string, std::array<std::vector<size_t>, 2>> by_clip;
  for (size_t i = 0; i < samples.size(); ++i) {
    by_clip[samples[i].clip_id][static_cast<int>(samples[i].label)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<size_t> chosen;
  for (auto& [clip_id, classes] : by_clip) {
    ClipBalance balance;
    balance.clip_id = clip_id;
    balance.class0_available = static_cast<int>(classes[0].size());
    balance.class1_available = static_cast<int>(classes[1].size());
    const int total = balance.class0_available + balance.class1_available;
    balance.p0 = static_cast<double>(balance.class0_available) / total;
    if (classes[0].empty() || classes[1].empty()) {
      if (report) report->push_back(balance);
      continue;
    }
    // Without replacement, so no class can give more than it has.
    balance.m = std::min({BalancedSampleCount(balance.p0, per_class_cap),
                          balance.class0_available, balance.class1_available});
    for (auto& pool : classes) {
      for (int k = 0; k < balance.m; ++k) {
        const size_t j = k + UniformBelow(rng, pool.size() - k);
        std::swap(pool[k], pool[j]);
        chosen.push_back(pool[k]);
      }
    }
    if (report) report->push_back(balance);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<LabeledSample> out;
  out.reserve(chosen.size());
  for (size_t i : chosen) out.push_back(samples[i]);
  return out;
}

std::string SerializeGateModel(const GateModel& model) {
  std::string out = "tree v1\ntau " + FormatDouble(model.tau) + "\n";
  for (const auto& node : model.tree.nodes()) {
    if (node.is_leaf) {
      out += "leaf " + FormatDouble(node.p_class1) + " " +
             std::to_string(node.n_samples) + "\n";
    } else {
      out += StrFormat("split %d %d\n", node.feature + 1, node.value);
    }
  }
  return out;
}

GateModel ParseGateModel(std::string_view text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 3 || lines[0] != "tree v1") {
    throw Error("model: expected 'tree v1' header");
  }
  const auto tau_line = SplitString(lines[1], ' ');
  if (tau_line.size() != 2 || tau_line[0] != "tau") {
    throw Error("model line 2: expected 'tau <float>'");
  }
  GateModel model;
  model.tau = ParseDouble(tau_line[1]);
  if (!(model.tau >= 0.0 && model.tau <= 1.0)) {
    throw Error("model: tau outside [0, 1]");
  }

  std::vector<DecisionTree::Node> nodes;
  size_t next_line = 2;
  // Pre-order; children are wired after both subtrees are read.
  std::function<int()> parse_node = [&]() -> int {
    if (next_line >= lines.size()) throw Error("model: tree is truncated");
    const size_t line_no = next_line + 1;
    const auto tokens = SplitString(lines[next_line++], ' ');
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    try {
      if (tokens.size() == 3 && tokens[0] == "leaf") {
        nodes[index].is_leaf = true;
        nodes[index].p_class1 = ParseDouble(tokens[1]);
        nodes[index].n_samples = ParseInt(tokens[2]);
        if (!(nodes[index].p_class1 >= 0.0 && nodes[index].p_class1 <= 1.0)) {
          throw Error("leaf probability outside [0, 1]");
        }
        return index;
      }
      if (tokens.size() == 3 && tokens[0] == "split") {
        const int feature = ParseInt(tokens[1]) - 1;
        const int value = ParseInt(tokens[2]);
        if (feature < 0 || feature >= kNumFeatures) {
          throw Error("split feature must be 1..4");
        }
        if (value < 0 || value >= kFeatureCardinality[feature]) {
          throw Error("split value out of range for its feature");
        }
        nodes[index].is_leaf = false;
        nodes[index].feature = feature;
        nodes[index].value = value;
      } else {
        throw Error("expected 'split' or 'leaf'");
      }
    } catch (const Error& e) {
      throw Error(StrFormat("model line %zu: %s", line_no, e.what()));
    }
    const int equal_child = parse_node();
    const int other_child = parse_node();
    nodes[index].equal_child = equal_child;
    nodes[index].other_child = other_child;
    return index;
  };
  parse_node();
  if (next_line != lines.size()) {
    throw Error(StrFormat("model line %zu: trailing content", next_line + 1));
  }
  model.tree = DecisionTree(std::move(nodes));
  return model;
}

GateModel ReadGateModel(const std::string& path) {
  try {
    return ParseGateModel(ReadFile(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void WriteGateModel(const GateModel& model, const std::string& path) {
  WriteFile(path, SerializeGateModel(model));
}

}  // namespace cgate
