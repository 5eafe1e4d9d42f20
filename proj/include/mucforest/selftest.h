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

#ifndef MUCFOREST_SELFTEST_H_
#define MUCFOREST_SELFTEST_H_

#include <cstdint>
#include <random>
#include <string>

#include "mucforest/box.h"
#include "mucforest/forest.h"

namespace mucforest {

struct TinyForestShape {
  int max_features = 3;
  int max_trees = 4;
  int max_depth = 3;
  int max_classes = 3;
};

// Thresholds lie on a coarse half-integer grid so trees share cut points.
Forest RandomTinyForest(std::mt19937_64& rng, const TinyForestShape& shape = {});

// Mixes unbounded sides, open and closed ends and point intervals that sit
// exactly on grid thresholds.
Box RandomQueryBox(std::mt19937_64& rng, int n_features);

struct SelfTestSummary {
  int forests = 0;
  int queries = 0;
  int disagreements = 0;
  int bad_witnesses = 0;
  std::string first_failure;

  bool ok() const { return disagreements == 0 && bad_witnesses == 0; }
};

// Compares the solver with the threshold-grid oracle on every class and both
// polarities of the target for `forests` random forests.
SelfTestSummary RunOracleSelfTest(int forests, std::uint64_t seed,
                                  int boxes_per_forest = 4);

}  // namespace mucforest

#endif  // MUCFOREST_SELFTEST_H_
