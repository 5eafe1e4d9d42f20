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

#ifndef MUCFOREST_DATASET_H_
#define MUCFOREST_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mucforest {

// Row-major numeric table with one integer class label per row.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> feature_names);

  void AddRow(std::span<const double> x, int label);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  int n_features() const { return static_cast<int>(feature_names_.size()); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * feature_names_.size(), feature_names_.size()};
  }
  std::span<double> mutable_row(std::size_t i) {
    return {values_.data() + i * feature_names_.size(), feature_names_.size()};
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  // Largest label + 1 (at least 2).
  int n_classes() const;

  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

// CSV with a header row, numeric feature columns and one label column holding
// non-negative integer class indices.
Dataset ParseCsv(const std::string& text, const std::string& label_column);
Dataset LoadCsv(const std::string& path, const std::string& label_column);
std::string WriteCsv(const Dataset& dataset, const std::string& label_column);

struct FeatureSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct FeatureStats {
  std::vector<FeatureSummary> features;

  // max - min, or 1 for constant columns.
  double Range(int feature) const;
};

FeatureStats ComputeFeatureStats(const Dataset& dataset);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Shuffles row indices with `seed` and puts the first round(train_fraction*n)
// rows into the training split.
TrainTestSplit SplitDataset(const Dataset& dataset, double train_fraction,
                            std::uint64_t seed);

}  // namespace mucforest

#endif  // MUCFOREST_DATASET_H_
