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

#include "mucforest/shapley.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "mucforest/errors.h"
#include "mucforest/parallel.h"

namespace mucforest {
namespace {

std::size_t WordCount(int universe) {
  return (static_cast<std::size_t>(universe) + 63) / 64;
}

// Lazily materialized Fisher-Yates shuffle of [0, n): each Next() returns a
// fresh uniformly chosen element until the range is exhausted.
class SparseShuffle {
 public:
  explicit SparseShuffle(std::uint64_t n) : n_(n) {}

  template <typename Rng>
  std::uint64_t Next(Rng& rng) {
    if (drawn_ == n_) {
      drawn_ = 0;
      swapped_.clear();
    }
    std::uniform_int_distribution<std::uint64_t> pick(drawn_, n_ - 1);
    const std::uint64_t j = pick(rng);
    const std::uint64_t value = At(j);
    swapped_[j] = At(drawn_);
    ++drawn_;
    return value;
  }

 private:
  std::uint64_t At(std::uint64_t i) const {
    auto it = swapped_.find(i);
    return it == swapped_.end() ? i : it->second;
  }

  std::uint64_t n_;
  std::uint64_t drawn_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> swapped_;
};

std::vector<double> ExactShapley(const MucTable& table, int jobs) {
  const int f = table.n_features;
  const std::size_t full = std::size_t{1} << f;
  // worth[mask] = signed count of rows whose core is a superset of mask;
  // accumulate rows at their core mask, then sum over supersets.
  std::vector<std::int64_t> worth(full, 0);
  for (const MucRow& row : table.rows) {
    std::size_t mask = 0;
    for (int m : row.core.Members()) mask |= std::size_t{1} << m;
    worth[mask] += row.label == table.class_of_interest ? 1 : -1;
  }
  for (int b = 0; b < f; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (!(mask & bit)) worth[mask] += worth[mask | bit];
    }
  }
  std::vector<double> weight(f);
  for (int s = 0; s < f; ++s) weight[s] = ShapleyWeight(s, f);

  std::vector<double> phi(f, 0.0);
  ParallelFor(static_cast<std::size_t>(f), jobs, [&](std::size_t i) {
    const std::size_t bit = std::size_t{1} << i;
    double sum = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (mask & bit) continue;
      const auto delta = static_cast<double>(worth[mask | bit] - worth[mask]);
      if (delta != 0.0) sum += weight[std::popcount(mask)] * delta;
    }
    phi[i] = sum;
  });
  return phi;
}

double SampledShapleyFor(const MucTable& table, int i,
                         const ShapleyOptions& options) {
  const int f = table.n_features;
  std::vector<int> others;
  for (int k = 0; k < f; ++k) {
    if (k != i) others.push_back(k);
  }
  const int n_others = static_cast<int>(others.size());
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                    static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(i)};
  std::mt19937_64 rng(seq);

  const bool without_replacement =
      options.sampling == SubsetSampling::kWithoutReplacement &&
      n_others <= 62;
  SparseShuffle shuffle(std::uint64_t{1} << std::min(n_others, 62));

  double phi = 0.0;
  FeatureSet s(f);
  for (std::uint64_t it = 0; it < options.iterations; ++it) {
    s = FeatureSet(f);
    if (without_replacement) {
      const std::uint64_t code = shuffle.Next(rng);
      for (int b = 0; b < n_others; ++b) {
        if (code >> b & 1) s.Insert(others[b]);
      }
    } else {
      for (int b = 0; b < n_others; b += 64) {
        const std::uint64_t word = rng();
        for (int k = b; k < std::min(n_others, b + 64); ++k) {
          if (word >> (k - b) & 1) s.Insert(others[k]);
        }
      }
    }
    const std::int64_t without_i = Worth(s, table);
    s.Insert(i);
    const std::int64_t with_i = Worth(s, table);
    phi += ShapleyWeight(s.Count() - 1, f) *
           static_cast<double>(with_i - without_i);
  }
  return phi;
}

}  // namespace

FeatureSet::FeatureSet(int universe)
    : universe_(universe), words_(WordCount(universe), 0) {}

FeatureSet FeatureSet::Of(int universe, std::span<const int> members) {
  FeatureSet out(universe);
  for (int m : members) out.Insert(m);
  return out;
}

void FeatureSet::Insert(int f) {
  if (f < 0 || f >= universe_) throw InputError("feature outside set universe");
  words_[f / 64] |= std::uint64_t{1} << (f % 64);
}

void FeatureSet::Erase(int f) {
  if (f < 0 || f >= universe_) throw InputError("feature outside set universe");
  words_[f / 64] &= ~(std::uint64_t{1} << (f % 64));
}

bool FeatureSet::Contains(int f) const {
  if (f < 0 || f >= universe_) return false;
  return words_[f / 64] >> (f % 64) & 1;
}

bool FeatureSet::IsSubsetOf(const FeatureSet& other) const {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t theirs = w < n ? other.words_[w] : 0;
    if (words_[w] & ~theirs) return false;
  }
  return true;
}

int FeatureSet::Count() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<int> FeatureSet::Members() const {
  std::vector<int> out;
  for (int f = 0; f < universe_; ++f) {
    if (Contains(f)) out.push_back(f);
  }
  return out;
}

void MucTable::Add(std::span<const int> core, int label) {
  rows.push_back({FeatureSet::Of(n_features, core), label});
}

MucTable MucTable::FromExplanations(std::span<const Explanation> explanations,
                                    int n_features, int class_of_interest) {
  MucTable table;
  table.n_features = n_features;
  table.class_of_interest = class_of_interest;
  for (const Explanation& e : explanations) {
    if (e.core) {
      table.Add(*e.core, e.label);
    } else {
      ++table.skipped;
    }
  }
  return table;
}

std::int64_t Worth(const FeatureSet& s, const MucTable& table) {
  std::int64_t total = 0;
  for (const MucRow& row : table.rows) {
    if (s.IsSubsetOf(row.core)) {
      total += row.label == table.class_of_interest ? 1 : -1;
    }
  }
  return total;
}

double ShapleyWeight(int s, int f) {
  if (f < 1 || s < 0 || s > f - 1) {
    throw InputError("Shapley weight needs 0 <= s <= f - 1");
  }
  // s! (f-s-1)! / f! = 1 / (f * C(f-1, s))
  if (f <= 60) {
    double binom = 1.0;
    for (int k = 1; k <= s; ++k) binom = binom * (f - 1 - s + k) / k;
    return 1.0 / (f * binom);
  }
  const double log_binom = std::lgamma(static_cast<double>(f)) -
                           std::lgamma(s + 1.0) -
                           std::lgamma(static_cast<double>(f - s));
  return std::exp(-std::log(static_cast<double>(f)) - log_binom);
}

Rational ShapleyWeightRational(int s, int f) {
  if (f < 1 || s < 0 || s > f - 1) {
    throw InputError("Shapley weight needs 0 <= s <= f - 1");
  }
  if (f > 20) throw InputError("exact Shapley weight limited to f <= 20");
  std::uint64_t binom = 1;
  for (int k = 1; k <= s; ++k) binom = binom * (f - 1 - s + k) / k;
  return {1, static_cast<std::uint64_t>(f) * binom};
}

ImportanceVector MShapley(const MucTable& table,
                          const ShapleyOptions& options) {
  if (table.rows.empty()) throw InputError("M-Shapley of an empty MUC table");
  if (table.n_features < 1) throw InputError("MUC table has no features");
  ImportanceVector out;
  out.mode = options.mode;
  if (options.mode == ShapleyMode::kExact) {
    const int limit = std::min(options.exact_limit, 30);
    if (table.n_features > limit) {
      throw ModeError("exact M-Shapley limited to " + std::to_string(limit) +
                      " features, table has " +
                      std::to_string(table.n_features));
    }
    out.phi = ExactShapley(table, options.jobs);
    return out;
  }
  out.iterations = options.iterations;
  out.seed = options.seed;
  out.phi.assign(table.n_features, 0.0);
  ParallelFor(static_cast<std::size_t>(table.n_features), options.jobs,
              [&](std::size_t i) {
                out.phi[i] =
                    SampledShapleyFor(table, static_cast<int>(i), options);
              });
  return out;
}

std::vector<int> RankByMagnitude(std::span<const double> phi) {
  std::vector<int> order(phi.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(phi[a]) > std::abs(phi[b]);
  });
  return order;
}

}  // namespace mucforest
