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

#include "mucforest/imputation.h"

#include <algorithm>

#include "mucforest/errors.h"
#include "mucforest/parallel.h"

namespace mucforest {
namespace {

void Impute(Dataset& data, std::span<const int> features,
            const FeatureStats& train_stats) {
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.mutable_row(r);
    for (int f : features) row[f] = train_stats.features[f].mean;
  }
}

}  // namespace

std::vector<ImputationPoint> EvaluateMeanImputation(
    const Dataset& dataset, std::span<const int> ranking,
    const ImputationOptions& options) {
  const int d = dataset.n_features();
  std::vector<int> sorted(ranking.begin(), ranking.end());
  std::sort(sorted.begin(), sorted.end());
  bool permutation = static_cast<int>(sorted.size()) == d;
  for (int i = 0; permutation && i < d; ++i) permutation = sorted[i] == i;
  if (!permutation) {
    throw InputError("ranking must be a permutation of the features");
  }
  for (int n : options.ns) {
    if (n < 0 || n > d) {
      throw InputError("N = " + std::to_string(n) + " outside [0, " +
                       std::to_string(d) + "]");
    }
  }
  if (options.shuffles < 1) throw InputError("shuffles must be >= 1");

  std::vector<TrainTestSplit> splits(options.shuffles);
  std::vector<FeatureStats> stats(options.shuffles);
  for (int s = 0; s < options.shuffles; ++s) {
    splits[s] =
        SplitDataset(dataset, options.train_fraction, options.seed + s);
    stats[s] = ComputeFeatureStats(splits[s].train);
  }

  const std::size_t n_points = options.ns.size();
  std::vector<double> acc(n_points * options.shuffles, 0.0);
  ParallelFor(acc.size(), options.jobs, [&](std::size_t job) {
    const std::size_t p = job / options.shuffles;
    const int s = static_cast<int>(job % options.shuffles);
    const std::span<const int> top = ranking.first(options.ns[p]);
    Dataset train = splits[s].train;
    Dataset test = splits[s].test;
    Impute(train, top, stats[s]);
    Impute(test, top, stats[s]);
    TrainParams params = options.params;
    params.seed = options.params.seed + s;
    const Forest forest = TrainForest(train, params);
    acc[job] = EvaluateAccuracy(forest, test);
  });

  std::vector<ImputationPoint> curve;
  for (std::size_t p = 0; p < n_points; ++p) {
    double sum = 0.0;
    for (int s = 0; s < options.shuffles; ++s) {
      sum += acc[p * options.shuffles + s];
    }
    curve.push_back({options.ns[p], sum / options.shuffles});
  }
  return curve;
}

}  // namespace mucforest
