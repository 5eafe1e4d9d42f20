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

#ifndef MUCFOREST_TRAINER_H_
#define MUCFOREST_TRAINER_H_

#include <cstdint>
#include <optional>

#include "mucforest/dataset.h"
#include "mucforest/forest.h"

namespace mucforest {

struct TrainParams {
  int n_trees = 15;
  int max_depth = 5;
  int min_samples_leaf = 1;
  bool bootstrap = true;
  // Candidate features per split; nullopt means floor(sqrt(n_features)).
  std::optional<int> features_per_split;
  std::uint64_t seed = 0;
};

struct TrainDiagnostics {
  // Set when the training data holds a single class and every tree is a
  // constant leaf.
  bool degenerate = false;
};

// Greedy CART trees on Gini impurity with midpoint thresholds. Leaves store
// the class frequencies of the (bootstrap) rows that reach them. Output is a
// pure function of (dataset, params).
Forest TrainForest(const Dataset& dataset, const TrainParams& params,
                   TrainDiagnostics* diagnostics = nullptr);

// Fraction of rows whose predicted label equals the stored label.
double EvaluateAccuracy(const Forest& forest, const Dataset& dataset);

}  // namespace mucforest

#endif  // MUCFOREST_TRAINER_H_
