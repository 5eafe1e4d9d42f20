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

#ifndef MUCFOREST_MUC_H_
#define MUCFOREST_MUC_H_

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mucforest/box.h"
#include "mucforest/dataset.h"
#include "mucforest/forest.h"
#include "mucforest/reach_solver.h"

namespace mucforest {

// A minimal unsatisfiable core, as sorted assumption (feature) ids.
using Core = std::vector<int>;

// is_unsat(S) must be monotone: S unsat implies every superset is unsat.
using UnsatOracle = std::function<bool(std::span<const int> subset)>;

// Deletion-based core extraction. Visits assumptions in ascending id order
// and drops each one whose removal keeps the set unsatisfiable. Uses at most
// |assumptions| + 1 oracle calls. Throws NoCoreError if the full set is
// satisfiable.
Core ExtractMuc(std::span<const int> assumptions, const UnsatOracle& is_unsat,
                std::size_t* oracle_calls = nullptr);

// Box used when a feature is not pinned by an assumption. Each interval is
// widened to include x so that pinning a feature can only shrink the box.
Box FreeDomainFor(const Box& free_domain, std::span<const double> x);

// The features whose values at x force the prediction y: a minimal S such
// that fixing x_i for i in S (others ranging over free_domain) admits no
// point predicted as anything but y. Throws NoCoreError when x is not
// predicted as y.
Core LocalExplanation(const ReachSolver& solver, std::span<const double> x,
                      int y, const Box& free_domain);
Core LocalExplanation(const Forest& forest, std::span<const double> x, int y,
                      const Box& free_domain);

struct FeatureUtilization {
  int mode = 0;         // most frequent core size (smallest on ties)
  double average = 0.0;
  double utilization = 0.0;  // average / n_features
};

FeatureUtilization ComputeFeatureUtilization(std::span<const Core> cores,
                                             int n_features);

struct Explanation {
  std::size_t sample = 0;
  int label = 0;
  std::optional<Core> core;  // nullopt: misclassified sample (no core)
  std::int64_t time_ms = 0;
};

// {"sample": int, "label": int, "core": [int], "core_names": [str],
//  "time_ms": int}
std::string ExplanationToJson(const Explanation& e,
                              const std::vector<std::string>& feature_names);

// Thread-safe per-sample core cache, keyed by sample index. Global
// importance reads every core repeatedly.
class ExplanationCache {
 public:
  ExplanationCache(const Forest& forest, Box free_domain);

  // Explains `dataset.row(sample)` against its stored label, or returns the
  // cached result.
  Explanation Get(const Dataset& dataset, std::size_t sample);

  // Explains every row, fanning out over `jobs` threads. Results are ordered
  // by sample index.
  std::vector<Explanation> ExplainAll(const Dataset& dataset, int jobs);

 private:
  ReachSolver solver_;
  Box free_domain_;
  std::mutex mu_;
  std::map<std::size_t, Explanation> cache_;
};

}  // namespace mucforest

#endif  // MUCFOREST_MUC_H_
