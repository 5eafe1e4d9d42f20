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

#include "mucforest/model_io.h"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mucforest/errors.h"

namespace mucforest {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(path + ": missing field \"" + key + "\"");
  }
  return *it;
}

int IntField(const json& obj, const char* key, const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_number_integer()) {
    throw ParseError(path + "." + key + ": expected an integer");
  }
  return v.get<int>();
}

double NumberField(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

Node ParseNode(const json& j, const std::string& path) {
  const json& kind = Field(j, "kind", path);
  if (!kind.is_string()) throw ParseError(path + ".kind: expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "split") {
    return Node::Split(IntField(j, "feature", path),
                       NumberField(Field(j, "threshold", path),
                                   path + ".threshold"),
                       IntField(j, "left", path), IntField(j, "right", path));
  }
  if (k == "leaf") {
    const json& probs = Field(j, "probs", path);
    if (!probs.is_array()) throw ParseError(path + ".probs: expected an array");
    std::vector<double> values;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      values.push_back(
          NumberField(probs[i], path + ".probs[" + std::to_string(i) + "]"));
    }
    return Node::Leaf(std::move(values));
  }
  throw ParseError(path + ".kind: unknown node kind \"" + k + "\"");
}

}  // namespace

Forest LoadModel(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  const std::string root = "$";
  const int n_classes = IntField(doc, "n_classes", root);
  const int n_features = IntField(doc, "n_features", root);

  std::vector<std::string> names;
  const json& jnames = Field(doc, "feature_names", root);
  if (!jnames.is_array()) throw ParseError("feature_names: expected an array");
  for (const auto& n : jnames) {
    if (!n.is_string()) throw ParseError("feature_names: expected strings");
    names.push_back(n.get<std::string>());
  }

  const json& jtrees = Field(doc, "trees", root);
  if (!jtrees.is_array()) throw ParseError("trees: expected an array");
  std::vector<Tree> trees;
  for (std::size_t t = 0; t < jtrees.size(); ++t) {
    const std::string tpath = "trees[" + std::to_string(t) + "]";
    Tree tree;
    tree.root = IntField(jtrees[t], "root", tpath);
    const json& jnodes = Field(jtrees[t], "nodes", tpath);
    if (!jnodes.is_array()) throw ParseError(tpath + ".nodes: expected array");
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
      tree.nodes.push_back(
          ParseNode(jnodes[i], tpath + ".nodes[" + std::to_string(i) + "]"));
    }
    trees.push_back(std::move(tree));
  }
  return Forest(n_classes, n_features, std::move(names), std::move(trees));
}

std::string SaveModel(const Forest& forest) {
  json doc;
  doc["n_classes"] = forest.n_classes();
  doc["n_features"] = forest.n_features();
  doc["feature_names"] = forest.feature_names();
  json trees = json::array();
  for (const Tree& tree : forest.trees()) {
    json nodes = json::array();
    for (const Node& node : tree.nodes) {
      if (node.is_leaf()) {
        nodes.push_back({{"kind", "leaf"}, {"probs", node.probs}});
      } else {
        nodes.push_back({{"kind", "split"},
                         {"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}, {"root", tree.root}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

Forest LoadModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadModel(buffer.str());
}

void SaveModelFile(const Forest& forest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file " + path);
  out << SaveModel(forest) << "\n";
}

}  // namespace mucforest
