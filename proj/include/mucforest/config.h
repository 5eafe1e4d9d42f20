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

#ifndef MUCFOREST_CONFIG_H_
#define MUCFOREST_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mucforest/attack.h"
#include "mucforest/box.h"
#include "mucforest/dataset.h"
#include "mucforest/report.h"
#include "mucforest/trainer.h"

namespace mucforest {

enum class FreeDomainPolicy { kUnbounded, kDataBounds };

FreeDomainPolicy ParseFreeDomainPolicy(const std::string& name);

// Per-run attack overrides; unset fields keep AttackConfig::Defaults.
struct AttackSettings {
  std::optional<double> kappa_fraction;  // kappa = fraction * range
  std::optional<int> n_candidates;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<double> beta;
  std::optional<double> eta0;
  std::optional<int> iterations;
};

struct RunConfig {
  std::string model;
  std::string data;
  std::string label = "label";
  int class_of_interest = 1;
  double split = 0.8;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::uint64_t shapley_iterations = 256;
  std::vector<std::string> immutable;
  FreeDomainPolicy free_domain = FreeDomainPolicy::kUnbounded;
  TrainParams train;
  AttackSettings attack;
  VerbTable verbs;
  std::string client_id = "client";

  void Validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);

std::vector<bool> ImmutableMask(const std::vector<std::string>& names,
                                const std::vector<std::string>& feature_names);

Box FreeDomain(FreeDomainPolicy policy, const FeatureStats& stats);

AttackConfig BuildAttackConfig(const RunConfig& config,
                               const FeatureStats& stats,
                               const std::vector<std::string>& feature_names);

}  // namespace mucforest

#endif  // MUCFOREST_CONFIG_H_
