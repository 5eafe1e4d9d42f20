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

#include "mucforest/forest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mucforest/errors.h"

namespace mucforest {
namespace {

constexpr double kProbTolerance = 1e-9;

std::string NodePath(std::size_t tree, std::size_t node) {
  return "trees[" + std::to_string(tree) + "].nodes[" + std::to_string(node) +
         "]";
}

void ValidateTree(const Tree& tree, std::size_t tree_index, int n_classes,
                  int n_features) {
  const std::string tree_path = "trees[" + std::to_string(tree_index) + "]";
  const int n = static_cast<int>(tree.nodes.size());
  if (n == 0) throw ParseError(tree_path + ": tree has no nodes");
  if (tree.root < 0 || tree.root >= n) {
    throw ParseError(tree_path + ": root " + std::to_string(tree.root) +
                     " out of range");
  }
  for (int i = 0; i < n; ++i) {
    const Node& node = tree.nodes[i];
    const std::string path = NodePath(tree_index, i);
    if (node.is_leaf()) {
      if (static_cast<int>(node.probs.size()) != n_classes) {
        throw ParseError(path + ": leaf has " +
                         std::to_string(node.probs.size()) +
                         " probabilities, expected " +
                         std::to_string(n_classes));
      }
      double sum = 0.0;
      for (double p : node.probs) {
        if (!std::isfinite(p) || p < 0.0) {
          throw ParseError(path + ": negative or non-finite probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kProbTolerance) {
        throw ParseError(path + ": unnormalized leaf (sum " +
                         std::to_string(sum) + ")");
      }
    } else {
      if (node.feature < 0 || node.feature >= n_features) {
        throw ParseError(path + ": feature " + std::to_string(node.feature) +
                         " out of range");
      }
      if (!std::isfinite(node.threshold)) {
        throw ParseError(path + ": non-finite threshold");
      }
      for (int child : {node.left, node.right}) {
        if (child < 0 || child >= n) {
          throw ParseError(path + ": dangling child id " +
                           std::to_string(child));
        }
      }
    }
  }

  // Walk from the root: every node must be reached exactly once.
  std::vector<int> seen(n, 0);
  std::vector<int> stack = {tree.root};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (seen[id]++) {
      throw ParseError(NodePath(tree_index, id) +
                       ": node reached twice (cycle or shared child)");
    }
    const Node& node = tree.nodes[id];
    if (!node.is_leaf()) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw ParseError(NodePath(tree_index, i) +
                       ": node unreachable from root");
    }
  }
}

}  // namespace

Node Node::Split(int feature, double threshold, int left, int right) {
  Node node;
  node.kind = Kind::kSplit;
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return node;
}

Node Node::Leaf(std::vector<double> probs) {
  Node node;
  node.kind = Kind::kLeaf;
  node.probs = std::move(probs);
  return node;
}

int Tree::LeafFor(std::span<const double> x) const {
  int id = root;
  while (!nodes[id].is_leaf()) {
    const Node& node = nodes[id];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return id;
}

int Tree::Depth() const {
  int best = 0;
  std::vector<std::pair<int, int>> stack = {{root, 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const Node& node = nodes[id];
    if (node.is_leaf()) {
      best = std::max(best, depth);
    } else {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return best;
}

int ArgmaxLowest(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Forest::Forest(int n_classes, int n_features,
               std::vector<std::string> feature_names, std::vector<Tree> trees)
    : n_classes_(n_classes),
      n_features_(n_features),
      feature_names_(std::move(feature_names)),
      trees_(std::move(trees)) {
  if (n_classes_ < 2) throw ParseError("n_classes must be >= 2");
  if (n_features_ < 1) throw ParseError("n_features must be >= 1");
  if (trees_.empty()) throw ParseError("forest has no trees");
  if (feature_names_.empty()) {
    for (int i = 0; i < n_features_; ++i) {
      feature_names_.push_back("f" + std::to_string(i));
    }
  }
  if (static_cast<int>(feature_names_.size()) != n_features_) {
    throw ParseError("feature_names has " +
                     std::to_string(feature_names_.size()) +
                     " entries, expected " + std::to_string(n_features_));
  }
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    ValidateTree(trees_[t], t, n_classes_, n_features_);
  }
}

void Forest::CheckInput(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_features_) {
    throw InputError("input has " + std::to_string(x.size()) +
                     " features, model expects " +
                     std::to_string(n_features_));
  }
}

Prediction Forest::Predict(std::span<const double> x) const {
  CheckInput(x);
  Prediction out;
  out.mean_probs.assign(n_classes_, 0.0);
  for (const Tree& tree : trees_) {
    const auto& probs = tree.nodes[tree.LeafFor(x)].probs;
    for (int c = 0; c < n_classes_; ++c) out.mean_probs[c] += probs[c];
  }
  const double k = static_cast<double>(trees_.size());
  for (double& p : out.mean_probs) p /= k;
  out.label = ArgmaxLowest(out.mean_probs);
  return out;
}

int Forest::PredictLabel(std::span<const double> x) const {
  return Predict(x).label;
}

int Forest::PredictLabelUnscaled(std::span<const double> x) const {
  CheckInput(x);
  std::vector<double> sums(n_classes_, 0.0);
  for (const Tree& tree : trees_) {
    const auto& probs = tree.nodes[tree.LeafFor(x)].probs;
    for (int c = 0; c < n_classes_; ++c) sums[c] += probs[c];
  }
  return ArgmaxLowest(sums);
}

std::vector<double> Forest::Thresholds(int feature) const {
  std::vector<double> out;
  for (const Tree& tree : trees_) {
    for (const Node& node : tree.nodes) {
      if (!node.is_leaf() && node.feature == feature) {
        out.push_back(node.threshold);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mucforest
