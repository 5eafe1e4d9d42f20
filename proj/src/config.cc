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

#include "mucforest/config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mucforest/errors.h"

namespace mucforest {
namespace {

using nlohmann::json;

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void ReadOptional(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void RejectUnknown(const json& j, const std::set<std::string>& known,
                   const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ParseError("config" + where + ": unknown key \"" + key + "\"");
    }
  }
}

}  // namespace

FreeDomainPolicy ParseFreeDomainPolicy(const std::string& name) {
  if (name == "unbounded") return FreeDomainPolicy::kUnbounded;
  if (name == "data") return FreeDomainPolicy::kDataBounds;
  throw InputError("free domain must be \"unbounded\" or \"data\", got \"" +
                   name + "\"");
}

void RunConfig::Validate() const {
  if (!(split > 0.0 && split < 1.0)) {
    throw InputError("split must be in (0, 1)");
  }
  if (jobs < 1) throw InputError("jobs must be >= 1");
  if (class_of_interest < 0) throw InputError("class must be >= 0");
  if (attack.kappa_fraction && !(*attack.kappa_fraction > 0.0)) {
    throw InputError("kappa fraction must be > 0");
  }
}

RunConfig ParseRunConfig(const std::string& json_text) {
  RunConfig c;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw ParseError("config: expected an object");
    RejectUnknown(j,
                  {"model", "data", "label", "class", "split", "seed", "jobs",
                   "M", "immutable", "free_domain", "train", "attack", "verbs",
                   "client_id"},
                  "");
    Read(j, "model", c.model);
    Read(j, "data", c.data);
    Read(j, "label", c.label);
    Read(j, "class", c.class_of_interest);
    Read(j, "split", c.split);
    Read(j, "seed", c.seed);
    Read(j, "jobs", c.jobs);
    Read(j, "M", c.shapley_iterations);
    Read(j, "immutable", c.immutable);
    if (j.contains("free_domain")) {
      c.free_domain = ParseFreeDomainPolicy(j.at("free_domain").get<std::string>());
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      RejectUnknown(t,
                    {"n_trees", "max_depth", "min_samples_leaf", "bootstrap",
                     "features_per_split", "seed"},
                    ".train");
      Read(t, "n_trees", c.train.n_trees);
      Read(t, "max_depth", c.train.max_depth);
      Read(t, "min_samples_leaf", c.train.min_samples_leaf);
      Read(t, "bootstrap", c.train.bootstrap);
      ReadOptional(t, "features_per_split", c.train.features_per_split);
      Read(t, "seed", c.train.seed);
    } else {
      c.train.seed = c.seed;
    }
    if (j.contains("attack")) {
      const json& a = j.at("attack");
      RejectUnknown(a,
                    {"kappa_fraction", "n_candidates", "alpha", "epsilon",
                     "beta", "eta0", "iterations"},
                    ".attack");
      ReadOptional(a, "kappa_fraction", c.attack.kappa_fraction);
      ReadOptional(a, "n_candidates", c.attack.n_candidates);
      ReadOptional(a, "alpha", c.attack.alpha);
      ReadOptional(a, "epsilon", c.attack.epsilon);
      ReadOptional(a, "beta", c.attack.beta);
      ReadOptional(a, "eta0", c.attack.eta0);
      ReadOptional(a, "iterations", c.attack.iterations);
    }
    if (!(j.contains("train") && j.at("train").contains("seed"))) {
      c.train.seed = c.seed;
    }
    Read(j, "verbs", c.verbs);
    Read(j, "client_id", c.client_id);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config \"" + path + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str());
}

std::vector<bool> ImmutableMask(const std::vector<std::string>& names,
                                const std::vector<std::string>& feature_names) {
  std::vector<bool> mask(feature_names.size(), false);
  for (const std::string& name : names) {
    const auto it =
        std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) {
      throw InputError("unknown immutable feature \"" + name + "\"");
    }
    mask[it - feature_names.begin()] = true;
  }
  return mask;
}

Box FreeDomain(FreeDomainPolicy policy, const FeatureStats& stats) {
  const int d = static_cast<int>(stats.features.size());
  if (policy == FreeDomainPolicy::kUnbounded) return Box::Unbounded(d);
  std::vector<Interval> ivs;
  for (const FeatureSummary& s : stats.features) {
    ivs.push_back(Interval::Closed(s.min, s.max));
  }
  return Box(std::move(ivs));
}

AttackConfig BuildAttackConfig(const RunConfig& config,
                               const FeatureStats& stats,
                               const std::vector<std::string>& feature_names) {
  AttackConfig a = AttackConfig::Defaults(stats);
  a.immutable = ImmutableMask(config.immutable, feature_names);
  a.seed = config.seed;
  const AttackSettings& s = config.attack;
  if (s.kappa_fraction) {
    for (std::size_t i = 0; i < a.kappa.size(); ++i) {
      a.kappa[i] = *s.kappa_fraction * stats.Range(static_cast<int>(i));
    }
  }
  if (s.n_candidates) a.n_candidates = *s.n_candidates;
  if (s.alpha) a.alpha = *s.alpha;
  if (s.epsilon) a.epsilon = *s.epsilon;
  if (s.beta) a.beta = *s.beta;
  if (s.eta0) a.eta0 = *s.eta0;
  if (s.iterations) a.iterations = *s.iterations;
  return a;
}

}  // namespace mucforest
