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

#ifndef CGATE_DTREE_H_
#define CGATE_DTREE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgate/features.h"

namespace cgate {

// Two-class Gini impurity 2p(1 - p) of a node whose class-1 fraction is p.
double Gini(double p_class1);

struct TrainConfig {
  int max_depth = 6;
  int min_leaf = 50;
  double min_gini_gain = 1e-4;
  uint64_t rng_seed = 1;
  double target_class0_precision = 0.80;
};

void ValidateTrainConfig(const TrainConfig& config);

// Equality split on one categorical feature.
struct Split {
  int feature = 0;  // 0-based
  int value = 0;
  double gain = 0.0;
};

// Impurity decrease G(parent) - sum_c (n_c / n) G(c) of splitting |samples|
// on feature == value.
double SplitGain(std::span<const LabeledSample> samples, int feature, int value);

// Best admissible split (both children >= min_leaf samples), ties resolved
// by lowest feature index then lowest value. Returns gain 0 and feature -1
// when nothing is admissible.
Split FindBestSplit(std::span<const LabeledSample> samples, int min_leaf);

// Flat pre-order CART tree. Node 0 is the root; a split's equal branch
// immediately follows it.
class DecisionTree {
 public:
  struct Node {
    bool is_leaf = true;
    int feature = 0;  // 0-based
    int value = 0;
    int equal_child = -1;
    int other_child = -1;
    // Leaves only.
    double p_class1 = 0.0;
    int n_samples = 0;

    bool operator==(const Node& other) const = default;
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  static DecisionTree Leaf(double p_class1, int n_samples);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  int Depth() const;
  int LeafCount() const;

  // Leaf reached by |features|. Allocation free.
  const Node& Route(const FeatureVector& features) const {
    int index = 0;
    while (!nodes_[index].is_leaf) {
      const Node& node = nodes_[index];
      index = features.Value(node.feature) == node.value ? node.equal_child
                                                         : node.other_child;
    }
    return nodes_[index];
  }
  double PClass1(const FeatureVector& features) const {
    return Route(features).p_class1;
  }

  bool operator==(const DecisionTree& other) const = default;

 private:
  std::vector<Node> nodes_;
};

// Greedy CART with Gini impurity. Throws on a single-class dataset.
DecisionTree TrainTree(std::span<const LabeledSample> dataset,
                       const TrainConfig& config);

// Classifier A: Class1 iff the reached leaf has p_class1 >= tau.
struct GateModel {
  DecisionTree tree;
  double tau = 0.0;

  Label Classify(const FeatureVector& features) const {
    return tree.PClass1(features) >= tau ? Label::kClass1 : Label::kClass0;
  }
  bool operator==(const GateModel& other) const = default;
};

// Fraction of predicted-Class0 samples whose label is Class0, or -1 when
// nothing is predicted Class0.
double Class0Precision(const GateModel& model,
                       std::span<const LabeledSample> samples);
double Class1Recall(const GateModel& model,
                    std::span<const LabeledSample> samples);

// Largest tau among {0, 1, leaf probabilities} whose Class0 precision on
// |holdout| reaches the target; tau = 0 (gate always open) otherwise.
GateModel TuneThreshold(const DecisionTree& tree,
                        std::span<const LabeledSample> holdout,
                        double target_class0_precision);

// M = floor(p0 * N) for p0 < 0.5, floor((1 - p0) * N) otherwise; at least 1.
int BalancedSampleCount(double p0, int per_class_cap);

struct ClipBalance {
  std::string clip_id;
  int class0_available = 0;
  int class1_available = 0;
  double p0 = 0.0;
  int m = 0;  // drawn per class; 0 when the clip was skipped
};

// Per clip, draws M samples from each class without replacement. Clips that
// lack a class contribute nothing. Output keeps the input's relative order.
std::vector<LabeledSample> BalancedSample(
    std::span<const LabeledSample> samples, int per_class_cap, uint64_t seed,
    std::vector<ClipBalance>* report = nullptr);

// Line-oriented text form: "tree v1", "tau <t>", then one
// "split <feature 1..4> <value>" or "leaf <p> <n>" line per node in
// pre-order.
std::string SerializeGateModel(const GateModel& model);
GateModel ParseGateModel(std::string_view text);

GateModel ReadGateModel(const std::string& path);
void WriteGateModel(const GateModel& model, const std::string& path);

}  // namespace cgate

#endif  // CGATE_DTREE_H_
