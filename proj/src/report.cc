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

#include "mucforest/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "mucforest/errors.h"
#include "mucforest/shapley.h"

namespace mucforest {
namespace {

std::string Printf(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

std::vector<Recommendation> Recommend(std::span<const double> x_org,
                                      std::span<const double> x_adv,
                                      const std::vector<std::string>& names,
                                      const std::vector<bool>& immutable,
                                      const VerbTable& verbs) {
  const std::size_t d = x_org.size();
  if (x_adv.size() != d || names.size() != d ||
      (!immutable.empty() && immutable.size() != d)) {
    throw InputError("report inputs differ in length");
  }
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < d; ++i) {
    if (x_adv[i] == x_org[i]) continue;
    if (!immutable.empty() && immutable[i]) continue;
    Recommendation r;
    r.feature = static_cast<int>(i);
    r.name = names[i];
    r.delta = x_adv[i] - x_org[i];
    r.increase = r.delta > 0.0;
    if (x_org[i] != 0.0) r.percent = r.delta / x_org[i] * 100.0;
    const auto it = verbs.find(r.name);
    r.verb = it != verbs.end() ? it->second
             : r.increase      ? "Increasing"
                               : "Reducing";
    out.push_back(std::move(r));
  }
  // Percent lines first by |p|, then absolute-delta lines by |delta|.
  std::stable_sort(out.begin(), out.end(),
                   [](const Recommendation& a, const Recommendation& b) {
                     if (a.percent.has_value() != b.percent.has_value()) {
                       return a.percent.has_value();
                     }
                     if (a.percent) {
                       return std::abs(*a.percent) > std::abs(*b.percent);
                     }
                     return std::abs(a.delta) > std::abs(b.delta);
                   });
  return out;
}

std::string FormatReport(const std::string& client_id,
                         std::span<const Recommendation> recommendations) {
  std::string text = "Dear " + client_id +
                     ", we provide you the following advice on your "
                     "application:\n";
  for (std::size_t k = 0; k < recommendations.size(); ++k) {
    const Recommendation& r = recommendations[k];
    text += r.verb + " " + r.name + " by about ";
    if (r.percent) {
      text += Printf("%.2f", std::abs(*r.percent)) + "%";
    } else {
      text += Printf("%.6g", std::abs(r.delta)) + " (absolute change)";
    }
    text += k + 1 < recommendations.size() ? ";\n" : "\n";
  }
  return text;
}

std::string GenerateReport(std::span<const double> x_org,
                           std::span<const double> x_adv,
                           const std::vector<std::string>& names,
                           const std::vector<bool>& immutable,
                           const std::string& client_id,
                           const VerbTable& verbs) {
  const auto recs = Recommend(x_org, x_adv, names, immutable, verbs);
  return FormatReport(client_id, recs);
}

std::vector<double> ApplyRecommendations(
    std::span<const double> x_org,
    std::span<const Recommendation> recommendations) {
  std::vector<double> x(x_org.begin(), x_org.end());
  for (const Recommendation& r : recommendations) {
    if (r.feature < 0 || r.feature >= static_cast<int>(x.size())) {
      throw InputError("recommendation feature out of range");
    }
    const double base = x_org[r.feature];
    x[r.feature] = r.percent ? base + base * (*r.percent / 100.0) : base + r.delta;
  }
  return x;
}

std::string RecommendationsToJson(
    std::span<const Recommendation> recommendations) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Recommendation& r : recommendations) {
    nlohmann::ordered_json j;
    j["feature"] = r.name;
    j["verb"] = r.verb;
    j["direction"] = r.increase ? "increase" : "reduce";
    if (r.percent) {
      j["percent"] = *r.percent;
    } else {
      j["percent"] = nullptr;
    }
    j["delta"] = r.delta;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string CoreSizeHistogramCsv(std::span<const std::size_t> core_sizes) {
  if (core_sizes.empty()) throw InputError("no cores to histogram");
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t s : core_sizes) ++counts[s];
  std::string csv = "core_size,count\n";
  for (const auto& [size, count] : counts) {
    csv += std::to_string(size) + "," + std::to_string(count) + "\n";
  }
  return csv;
}

std::string ShapleyBarsCsv(const std::vector<std::string>& names,
                           std::span<const double> phi) {
  if (phi.empty()) throw InputError("no importance values");
  if (names.size() != phi.size()) {
    throw InputError("feature names and importance differ in length");
  }
  std::string csv = "feature,phi\n";
  for (int f : RankByMagnitude(phi)) {
    csv += names[f] + "," + Printf("%.17g", phi[f]) + "\n";
  }
  return csv;
}

std::string ImputationCurveCsv(std::span<const ImputationPoint> curve) {
  if (curve.empty()) throw InputError("empty imputation curve");
  std::string csv = "N,accuracy\n";
  for (const ImputationPoint& p : curve) {
    csv += std::to_string(p.n) + "," + Printf("%.17g", p.accuracy) + "\n";
  }
  return csv;
}

}  // namespace mucforest
