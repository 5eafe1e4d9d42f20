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

#include "mucforest/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "mucforest/errors.h"

namespace mucforest {
namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TrainParams& params, int n_classes,
              int features_per_split, std::mt19937_64& rng)
      : data_(data),
        params_(params),
        n_classes_(n_classes),
        features_per_split_(features_per_split),
        rng_(rng) {}

  Tree Build(std::vector<std::size_t> samples) {
    tree_.nodes.clear();
    tree_.root = Grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  int Grow(std::vector<std::size_t> samples, int depth) {
    std::vector<double> counts(n_classes_, 0.0);
    for (std::size_t s : samples) counts[data_.label(s)] += 1.0;
    const bool pure =
        std::count_if(counts.begin(), counts.end(),
                      [](double c) { return c > 0.0; }) <= 1;

    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::optional<SplitChoice> split;
    if (!pure && depth < params_.max_depth &&
        samples.size() >= 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
      split = ChooseSplit(samples);
    }
    if (!split) {
      const double n = static_cast<double>(samples.size());
      for (double& c : counts) c /= n;
      tree_.nodes[id] = Node::Leaf(std::move(counts));
      return id;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t s : samples) {
      (data_.row(s)[split->feature] <= split->threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int l = Grow(std::move(left), depth + 1);
    const int r = Grow(std::move(right), depth + 1);
    tree_.nodes[id] = Node::Split(split->feature, split->threshold, l, r);
    return id;
  }

  std::optional<SplitChoice> ChooseSplit(
      const std::vector<std::size_t>& samples) {
    const int d = data_.n_features();
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first m entries are the sampled features.
    const int m = std::min(features_per_split_, d);
    for (int i = 0; i < m; ++i) {
      std::uniform_int_distribution<int> pick(i, d - 1);
      std::swap(order[i], order[pick(rng_)]);
    }
    std::vector<int> sampled(order.begin(), order.begin() + m);
    std::vector<int> rest(order.begin() + m, order.end());
    std::sort(sampled.begin(), sampled.end());
    std::sort(rest.begin(), rest.end());

    if (auto best = BestSplit(samples, sampled)) return best;
    // Every sampled feature was constant within the node.
    return BestSplit(samples, rest);
  }

  std::optional<SplitChoice> BestSplit(const std::vector<std::size_t>& samples,
                                       const std::vector<int>& features) {
    std::optional<SplitChoice> best;
    const std::size_t n = samples.size();
    const std::size_t min_leaf = params_.min_samples_leaf;
    std::vector<std::pair<double, int>> column(n);
    std::vector<double> left(n_classes_), total(n_classes_, 0.0);
    for (std::size_t s : samples) total[data_.label(s)] += 1.0;

    for (int f : features) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.row(samples[i])[f], data_.label(samples[i])};
      }
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0.0);
      for (std::size_t i = 1; i < n; ++i) {
        left[column[i - 1].second] += 1.0;
        if (column[i - 1].first == column[i].first) continue;
        if (i < min_leaf || n - i < min_leaf) continue;
        const double nl = static_cast<double>(i);
        const double nr = static_cast<double>(n - i);
        double sl = 0.0, sr = 0.0;
        for (int c = 0; c < n_classes_; ++c) {
          sl += left[c] * left[c];
          const double rc = total[c] - left[c];
          sr += rc * rc;
        }
        // Sum over children of n_child * gini(child).
        const double score = (nl - sl / nl) + (nr - sr / nr);
        if (!best || score < best->score - 1e-12 * (1.0 + best->score)) {
          const double a = column[i - 1].first;
          const double b = column[i].first;
          double threshold = a + (b - a) / 2.0;
          if (threshold >= b) threshold = a;
          best = SplitChoice{f, threshold, score};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const TrainParams& params_;
  int n_classes_;
  int features_per_split_;
  std::mt19937_64& rng_;
  Tree tree_;
};

}  // namespace

Forest TrainForest(const Dataset& dataset, const TrainParams& params,
                   TrainDiagnostics* diagnostics) {
  if (params.n_trees < 1) throw InputError("n_trees must be >= 1");
  if (params.max_depth < 1) throw InputError("max_depth must be >= 1");
  if (params.min_samples_leaf < 1) {
    throw InputError("min_samples_leaf must be >= 1");
  }
  if (dataset.size() < 2) throw InputError("need at least 2 training rows");

  const int d = dataset.n_features();
  const int n_classes = dataset.n_classes();
  int per_split = params.features_per_split.value_or(
      std::max(1, static_cast<int>(std::floor(std::sqrt(d)))));
  if (per_split < 1) throw InputError("features_per_split must be >= 1");
  per_split = std::min(per_split, d);

  std::vector<int> present(n_classes, 0);
  for (int y : dataset.labels()) present[y] = 1;
  const bool degenerate = std::accumulate(present.begin(), present.end(), 0) < 2;
  if (diagnostics) diagnostics->degenerate = degenerate;

  std::vector<Tree> trees;
  trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                      static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> samples(dataset.size());
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
      for (auto& s : samples) s = pick(rng);
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeBuilder builder(dataset, params, n_classes, per_split, rng);
    trees.push_back(builder.Build(std::move(samples)));
  }
  return Forest(n_classes, d, dataset.feature_names(), std::move(trees));
}

double EvaluateAccuracy(const Forest& forest, const Dataset& dataset) {
  if (dataset.empty()) throw InputError("accuracy of an empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (forest.PredictLabel(dataset.row(i)) == dataset.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace mucforest
