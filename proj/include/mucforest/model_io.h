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

#ifndef MUCFOREST_MODEL_IO_H_
#define MUCFOREST_MODEL_IO_H_

#include <string>
#include <string_view>

#include "mucforest/forest.h"

namespace mucforest {

// JSON interchange format:
//   {"n_classes": int, "n_features": int, "feature_names": [str],
//    "trees": [{"nodes": [{"kind": "split", "feature": int,
//                          "threshold": float64, "left": int, "right": int}
//                        | {"kind": "leaf", "probs": [float64]}],
//               "root": int}]}
// Thresholds and probabilities are written with round-trip precision.
Forest LoadModel(std::string_view json_text);
std::string SaveModel(const Forest& forest);

Forest LoadModelFile(const std::string& path);
void SaveModelFile(const Forest& forest, const std::string& path);

}  // namespace mucforest

#endif  // MUCFOREST_MODEL_IO_H_
