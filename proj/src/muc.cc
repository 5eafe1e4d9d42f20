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

#include "mucforest/muc.h"

#include <algorithm>
#include <chrono>
#include <map>

#include "json.hpp"
#include "mucforest/errors.h"
#include "mucforest/parallel.h"

namespace mucforest {

Core ExtractMuc(std::span<const int> assumptions, const UnsatOracle& is_unsat,
                std::size_t* oracle_calls) {
  std::vector<int> current(assumptions.begin(), assumptions.end());
  std::sort(current.begin(), current.end());
  current.erase(std::unique(current.begin(), current.end()), current.end());

  std::size_t calls = 1;
  if (!is_unsat(current)) {
    if (oracle_calls) *oracle_calls = calls;
    throw NoCoreError("assumption set is satisfiable; no core exists");
  }
  const std::vector<int> order = current;
  std::vector<int> trial;
  for (int id : order) {
    trial.clear();
    for (int a : current) {
      if (a != id) trial.push_back(a);
    }
    ++calls;
    if (is_unsat(trial)) current.swap(trial);
  }
  if (oracle_calls) *oracle_calls = calls;
  return current;
}

Box FreeDomainFor(const Box& free_domain, std::span<const double> x) {
  if (free_domain.size() != static_cast<int>(x.size())) {
    throw InputError("free domain dimension mismatch");
  }
  Box out = free_domain;
  for (int i = 0; i < out.size(); ++i) {
    Interval& iv = out[i];
    if (!iv.Contains(x[i])) {
      if (x[i] <= iv.lo) {
        iv.lo = x[i];
        iv.lo_open = false;
      }
      if (x[i] >= iv.hi) {
        iv.hi = x[i];
        iv.hi_open = false;
      }
    }
  }
  return out;
}

Core LocalExplanation(const ReachSolver& solver, std::span<const double> x,
                      int y, const Box& free_domain) {
  const Forest& forest = solver.forest();
  if (static_cast<int>(x.size()) != forest.n_features()) {
    throw InputError("sample dimension mismatch");
  }
  if (y < 0 || y >= forest.n_classes()) throw InputError("label out of range");
  const Box base = FreeDomainFor(free_domain, x);
  auto is_unsat = [&](std::span<const int> fixed) {
    Box box = base;
    for (int f : fixed) box[f] = Interval::Point(x[f]);
    return !solver.Decide(box, Target::Not(y)).sat;
  };
  std::vector<int> all(forest.n_features());
  for (int i = 0; i < forest.n_features(); ++i) all[i] = i;
  try {
    return ExtractMuc(all, is_unsat);
  } catch (const NoCoreError&) {
    throw NoCoreError("sample is predicted as class " +
                      std::to_string(forest.PredictLabel(x)) + ", not " +
                      std::to_string(y));
  }
}

Core LocalExplanation(const Forest& forest, std::span<const double> x, int y,
                      const Box& free_domain) {
  return LocalExplanation(ReachSolver(forest), x, y, free_domain);
}

FeatureUtilization ComputeFeatureUtilization(std::span<const Core> cores,
                                             int n_features) {
  if (cores.empty()) throw InputError("feature utilization of no cores");
  if (n_features < 1) throw InputError("n_features must be >= 1");
  std::map<std::size_t, int> histogram;
  double total = 0.0;
  for (const Core& core : cores) {
    ++histogram[core.size()];
    total += static_cast<double>(core.size());
  }
  FeatureUtilization out;
  int best_count = 0;
  for (const auto& [size, count] : histogram) {
    if (count > best_count) {
      best_count = count;
      out.mode = static_cast<int>(size);
    }
  }
  out.average = total / static_cast<double>(cores.size());
  out.utilization = out.average / n_features;
  return out;
}

std::string ExplanationToJson(const Explanation& e,
                              const std::vector<std::string>& feature_names) {
  nlohmann::ordered_json j;
  j["sample"] = e.sample;
  j["label"] = e.label;
  if (e.core) {
    j["core"] = *e.core;
    std::vector<std::string> names;
    for (int f : *e.core) names.push_back(feature_names.at(f));
    j["core_names"] = names;
  } else {
    j["core"] = nullptr;
    j["core_names"] = nullptr;
  }
  j["time_ms"] = e.time_ms;
  return j.dump();
}

ExplanationCache::ExplanationCache(const Forest& forest, Box free_domain)
    : solver_(forest), free_domain_(std::move(free_domain)) {}

Explanation ExplanationCache::Get(const Dataset& dataset, std::size_t sample) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(sample);
    if (it != cache_.end()) return it->second;
  }
  Explanation e;
  e.sample = sample;
  e.label = dataset.label(sample);
  const auto start = std::chrono::steady_clock::now();
  try {
    e.core = LocalExplanation(solver_, dataset.row(sample), e.label,
                              free_domain_);
  } catch (const NoCoreError&) {
    e.core.reset();
  }
  e.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(sample, std::move(e)).first->second;
}

std::vector<Explanation> ExplanationCache::ExplainAll(const Dataset& dataset,
                                                      int jobs) {
  std::vector<Explanation> out(dataset.size());
  ParallelFor(dataset.size(), jobs,
              [&](std::size_t i) { out[i] = Get(dataset, i); });
  return out;
}

}  // namespace mucforest
