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

#include "mucforest/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "mucforest/errors.h"

namespace mucforest {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r\"");
    const auto last = cell.find_last_not_of(" \t\r\"");
    out.push_back(first == std::string::npos
                      ? std::string()
                      : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNumber(const std::string& cell, std::size_t line_no,
                   std::size_t column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ", column " +
                     std::to_string(column) + ": not a number: \"" + cell +
                     "\"");
  }
  return value;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> feature_names)
    : feature_names_(std::move(feature_names)) {}

void Dataset::AddRow(std::span<const double> x, int label) {
  if (x.size() != feature_names_.size()) {
    throw InputError("row has " + std::to_string(x.size()) +
                     " values, dataset has " +
                     std::to_string(feature_names_.size()) + " features");
  }
  if (label < 0) throw InputError("negative class label");
  values_.insert(values_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

int Dataset::n_classes() const {
  int max_label = 1;
  for (int y : labels_) max_label = std::max(max_label, y);
  return max_label + 1;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out(feature_names_);
  out.values_.reserve(indices.size() * feature_names_.size());
  out.labels_.reserve(indices.size());
  for (std::size_t i : indices) out.AddRow(row(i), label(i));
  return out;
}

Dataset ParseCsv(const std::string& text, const std::string& label_column) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  const std::vector<std::string> header = SplitLine(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw ParseError("label column \"" + label_column + "\" not in header");
  }
  const std::size_t label_index = label_it - header.begin();

  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != label_index) names.push_back(header[i]);
  }
  if (names.empty()) throw ParseError("CSV has no feature columns");

  Dataset dataset(names);
  std::vector<double> x(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " columns, got " +
                       std::to_string(cells.size()));
    }
    int label = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = ParseNumber(cells[i], line_no, i);
      if (i == label_index) {
        if (v < 0 || v != std::floor(v)) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": label must be a non-negative integer");
        }
        label = static_cast<int>(v);
      } else {
        x[k++] = v;
      }
    }
    dataset.AddRow(x, label);
  }
  return dataset;
}

Dataset LoadCsv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), label_column);
}

std::string WriteCsv(const Dataset& dataset, const std::string& label_column) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& name : dataset.feature_names()) out << name << ",";
  out << label_column << "\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.row(i)) out << v << ",";
    out << dataset.label(i) << "\n";
  }
  return out.str();
}

double FeatureStats::Range(int feature) const {
  const auto& f = features.at(feature);
  const double r = f.max - f.min;
  return r > 0.0 ? r : 1.0;
}

FeatureStats ComputeFeatureStats(const Dataset& dataset) {
  if (dataset.empty()) throw InputError("feature stats of an empty dataset");
  const int d = dataset.n_features();
  const double n = static_cast<double>(dataset.size());
  FeatureStats stats;
  stats.features.resize(d);
  for (int f = 0; f < d; ++f) {
    auto& s = stats.features[f];
    s.min = s.max = dataset.row(0)[f];
    double sum = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const double v = dataset.row(i)[f];
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
      sum += v;
    }
    s.mean = std::clamp(sum / n, s.min, s.max);
    double sq = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const double dv = dataset.row(i)[f] - s.mean;
      sq += dv * dv;
    }
    s.std = std::sqrt(sq / n);
  }
  return stats;
}

TrainTestSplit SplitDataset(const Dataset& dataset, double train_fraction,
                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(order.size())));
  TrainTestSplit split;
  split.train_indices.assign(order.begin(), order.begin() + n_train);
  split.test_indices.assign(order.begin() + n_train, order.end());
  split.train = dataset.Subset(split.train_indices);
  split.test = dataset.Subset(split.test_indices);
  return split;
}

}  // namespace mucforest
