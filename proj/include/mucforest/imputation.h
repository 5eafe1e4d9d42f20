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

#ifndef MUCFOREST_IMPUTATION_H_
#define MUCFOREST_IMPUTATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mucforest/dataset.h"
#include "mucforest/trainer.h"

namespace mucforest {

struct ImputationPoint {
  int n = 0;
  double accuracy = 0.0;
};

struct ImputationOptions {
  std::vector<int> ns;
  int shuffles = 10;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  TrainParams params;
  int jobs = 1;
};

// For each N, overwrites the top-N ranked features with their training-split
// mean in both splits, retrains, and records test accuracy. Accuracies are
// averaged over `shuffles` random train/test splits; split s and its forest
// are seeded from (seed + s, params.seed + s), so every N sees the same
// splits.
std::vector<ImputationPoint> EvaluateMeanImputation(
    const Dataset& dataset, std::span<const int> ranking,
    const ImputationOptions& options);

}  // namespace mucforest

#endif  // MUCFOREST_IMPUTATION_H_
