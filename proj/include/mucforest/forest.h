// Copyright 2026 The mucforest Authors.
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

#ifndef MUCFOREST_FOREST_H_
#define MUCFOREST_FOREST_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mucforest {

// A tree node. Split nodes send x to `left` iff x[feature] <= threshold and to
// `right` otherwise. Leaf nodes carry a class-probability vector.
struct Node {
  enum class Kind { kSplit, kLeaf };

  Kind kind = Kind::kLeaf;
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> probs;

  static Node Split(int feature, double threshold, int left, int right);
  static Node Leaf(std::vector<double> probs);

  bool is_leaf() const { return kind == Kind::kLeaf; }
  bool operator==(const Node&) const = default;
};

struct Tree {
  std::vector<Node> nodes;
  int root = 0;

  // Index of the leaf reached by x.
  int LeafFor(std::span<const double> x) const;
  // Number of split nodes on the longest root-to-leaf path.
  int Depth() const;

  bool operator==(const Tree&) const = default;
};

struct Prediction {
  int label = 0;
  std::vector<double> mean_probs;
};

// Index of the largest entry; ties go to the lowest index.
int ArgmaxLowest(std::span<const double> values);

// An immutable random-forest classifier. The constructor validates every
// structural invariant and throws ParseError naming the offending node.
class Forest {
 public:
  Forest(int n_classes, int n_features, std::vector<std::string> feature_names,
         std::vector<Tree> trees);

  int n_classes() const { return n_classes_; }
  int n_features() const { return n_features_; }
  std::size_t n_trees() const { return trees_.size(); }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  // Averages the leaf probability vectors reached in every tree (summed in
  // tree order, then divided by the tree count) and returns the argmax.
  Prediction Predict(std::span<const double> x) const;
  int PredictLabel(std::span<const double> x) const;

  // Same argmax without the 1/k factor.
  int PredictLabelUnscaled(std::span<const double> x) const;

  // Every split threshold used on `feature`, sorted and deduplicated.
  std::vector<double> Thresholds(int feature) const;

  bool operator==(const Forest&) const = default;

 private:
  void CheckInput(std::span<const double> x) const;

  int n_classes_;
  int n_features_;
  std::vector<std::string> feature_names_;
  std::vector<Tree> trees_;
};

}  // namespace mucforest

#endif  // MUCFOREST_FOREST_H_
