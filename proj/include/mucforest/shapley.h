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

#ifndef MUCFOREST_SHAPLEY_H_
#define MUCFOREST_SHAPLEY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mucforest/muc.h"

namespace mucforest {

// Subset of {0, ..., universe-1} as a bitset.
class FeatureSet {
 public:
  explicit FeatureSet(int universe = 0);
  static FeatureSet Of(int universe, std::span<const int> members);

  int universe() const { return universe_; }
  void Insert(int f);
  void Erase(int f);
  bool Contains(int f) const;
  bool IsSubsetOf(const FeatureSet& other) const;
  int Count() const;
  std::vector<int> Members() const;

  bool operator==(const FeatureSet&) const = default;

 private:
  int universe_;
  std::vector<std::uint64_t> words_;
};

struct MucRow {
  FeatureSet core;
  int label = 0;
};

// The local-explanation cores of a set of samples together with their labels
// and the class of interest. Samples without a core are counted in
// `skipped`.
struct MucTable {
  int n_features = 0;
  int class_of_interest = 0;
  std::vector<MucRow> rows;
  std::size_t skipped = 0;

  void Add(std::span<const int> core, int label);
  static MucTable FromExplanations(std::span<const Explanation> explanations,
                                   int n_features, int class_of_interest);
};

// Signed count of rows whose core contains S: +1 for rows labelled with the
// class of interest, -1 otherwise.
std::int64_t Worth(const FeatureSet& s, const MucTable& table);

// |S|! (f - |S| - 1)! / f!, for 0 <= s <= f - 1.
double ShapleyWeight(int s, int f);

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const Rational&) const = default;
};
// Exact reduced form of ShapleyWeight; f <= 20.
Rational ShapleyWeightRational(int s, int f);

enum class ShapleyMode { kExact, kSampled };

// How the sampled estimator draws subsets of F \ {f_i}. Every draw is
// uniform over all 2^(|F|-1) subsets in both schemes.
//  kWithoutReplacement: draws within one feature's stream are distinct until
//    all subsets have been seen, then a new pass starts. With M = 2^(|F|-1)
//    the estimate equals the exact value. Falls back to kIid when
//    |F| - 1 > 62.
//  kIid: independent draws.
enum class SubsetSampling { kWithoutReplacement, kIid };

struct ShapleyOptions {
  ShapleyMode mode = ShapleyMode::kExact;
  std::uint64_t iterations = 256;  // M, sampled mode
  std::uint64_t seed = 0;
  SubsetSampling sampling = SubsetSampling::kWithoutReplacement;
  int exact_limit = 20;
  int jobs = 1;
};

struct ImportanceVector {
  std::vector<double> phi;
  ShapleyMode mode = ShapleyMode::kExact;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
};

// MUC-driven Shapley values for the table's class of interest.
//  exact:   phi_i = sum over S in F\{i} of w(|S|) (Worth(S+i) - Worth(S)).
//  sampled: phi_i accumulates w(|S|) (Worth(S+i) - Worth(S)) over M random
//           subsets, without dividing by M.
ImportanceVector MShapley(const MucTable& table, const ShapleyOptions& options);

// Feature indices ordered by |phi| descending, lower index first on ties.
std::vector<int> RankByMagnitude(std::span<const double> phi);

}  // namespace mucforest

#endif  // MUCFOREST_SHAPLEY_H_
