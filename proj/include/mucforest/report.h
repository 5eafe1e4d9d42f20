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

#ifndef MUCFOREST_REPORT_H_
#define MUCFOREST_REPORT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mucforest/imputation.h"

namespace mucforest {

// One suggested change to a single mutable feature.
struct Recommendation {
  int feature = 0;
  std::string name;
  std::string verb;
  bool increase = false;
  // (x_adv - x_org) / x_org * 100, unset when x_org is zero.
  std::optional<double> percent;
  double delta = 0.0;  // x_adv - x_org
};

// Feature name to a fixed verb such as "Shorten".
using VerbTable = std::map<std::string, std::string>;

std::vector<Recommendation> Recommend(std::span<const double> x_org,
                                      std::span<const double> x_adv,
                                      const std::vector<std::string>& names,
                                      const std::vector<bool>& immutable,
                                      const VerbTable& verbs = {});

std::string FormatReport(const std::string& client_id,
                         std::span<const Recommendation> recommendations);

std::string GenerateReport(std::span<const double> x_org,
                           std::span<const double> x_adv,
                           const std::vector<std::string>& names,
                           const std::vector<bool>& immutable,
                           const std::string& client_id,
                           const VerbTable& verbs = {});

// Re-applies every recommendation to x_org.
std::vector<double> ApplyRecommendations(
    std::span<const double> x_org,
    std::span<const Recommendation> recommendations);

std::string RecommendationsToJson(
    std::span<const Recommendation> recommendations);

std::string CoreSizeHistogramCsv(std::span<const std::size_t> core_sizes);
std::string ShapleyBarsCsv(const std::vector<std::string>& names,
                           std::span<const double> phi);
std::string ImputationCurveCsv(std::span<const ImputationPoint> curve);

}  // namespace mucforest

#endif  // MUCFOREST_REPORT_H_
