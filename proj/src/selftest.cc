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

#include "mucforest/selftest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mucforest/reach_solver.h"

namespace mucforest {
namespace {

double GridValue(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(-4, 4)(rng) * 0.5;
}

int Grow(std::mt19937_64& rng, int depth, int n_features, int n_classes,
         std::vector<Node>& nodes) {
  const int index = static_cast<int>(nodes.size());
  const bool leaf =
      depth == 0 || std::bernoulli_distribution(0.25)(rng);
  if (leaf) {
    std::vector<double> probs(n_classes);
    // Integer weights make exact vote ties reasonably common.
    std::uniform_int_distribution<int> w(0, 3);
    double total = 0.0;
    for (double& p : probs) total += (p = w(rng));
    if (total == 0.0) {
      probs[std::uniform_int_distribution<int>(0, n_classes - 1)(rng)] = 1.0;
      total = 1.0;
    }
    for (double& p : probs) p /= total;
    nodes.push_back(Node::Leaf(std::move(probs)));
    return index;
  }
  const int feature = std::uniform_int_distribution<int>(0, n_features - 1)(rng);
  nodes.push_back(Node::Split(feature, GridValue(rng), -1, -1));
  const int left = Grow(rng, depth - 1, n_features, n_classes, nodes);
  const int right = Grow(rng, depth - 1, n_features, n_classes, nodes);
  nodes[index].left = left;
  nodes[index].right = right;
  return index;
}

}  // namespace

Forest RandomTinyForest(std::mt19937_64& rng, const TinyForestShape& shape) {
  const int d = std::uniform_int_distribution<int>(1, shape.max_features)(rng);
  const int k = std::uniform_int_distribution<int>(1, shape.max_trees)(rng);
  const int c = std::uniform_int_distribution<int>(2, shape.max_classes)(rng);
  std::vector<Tree> trees;
  for (int t = 0; t < k; ++t) {
    Tree tree;
    const int depth = std::uniform_int_distribution<int>(0, shape.max_depth)(rng);
    tree.root = Grow(rng, depth, d, c, tree.nodes);
    trees.push_back(std::move(tree));
  }
  return Forest(c, d, {}, std::move(trees));
}

Box RandomQueryBox(std::mt19937_64& rng, int n_features) {
  std::vector<Interval> ivs;
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> kind(0, 4);
  for (int f = 0; f < n_features; ++f) {
    switch (kind(rng)) {
      case 0:
        ivs.push_back(Interval::All());
        break;
      case 1:
        ivs.push_back(Interval::Point(GridValue(rng)));
        break;
      case 2: {
        const double a = GridValue(rng), b = GridValue(rng);
        const bool lo_open = coin(rng);
        const bool hi_open = coin(rng);
        ivs.push_back(Interval{std::min(a, b), std::max(a, b), lo_open, hi_open});
        break;
      }
      case 3: {
        const double t = GridValue(rng) + (coin(rng) ? 0.25 : 0.0);
        Interval side = coin(rng) ? Interval::AtMost(t) : Interval::Above(t);
        if (std::isfinite(side.lo)) side.lo_open = coin(rng);
        if (std::isfinite(side.hi)) side.hi_open = coin(rng);
        ivs.push_back(side);
        break;
      }
      default: {
        const double a = GridValue(rng) - 0.25;
        ivs.push_back(Interval::Closed(a, a + 0.5));
        break;
      }
    }
  }
  return Box(std::move(ivs));
}

SelfTestSummary RunOracleSelfTest(int forests, std::uint64_t seed,
                                  int boxes_per_forest) {
  SelfTestSummary summary;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < forests; ++n) {
    const Forest forest = RandomTinyForest(rng);
    const ReachSolver solver(forest);
    ++summary.forests;
    for (int b = 0; b <= boxes_per_forest; ++b) {
      const Box box = b == 0 ? Box::Unbounded(forest.n_features())
                             : RandomQueryBox(rng, forest.n_features());
      const std::vector<Cell> cells = EnumerateCells(forest, box);
      for (int cls = 0; cls < forest.n_classes(); ++cls) {
        for (const Target target : {Target::Is(cls), Target::Not(cls)}) {
          ++summary.queries;
          const bool expected =
              std::any_of(cells.begin(), cells.end(), [&](const Cell& c) {
                return target.Accepts(c.label);
              });
          const SatResult got = solver.Decide(box, target);
          if (got.sat != expected) {
            if (summary.ok()) {
              summary.first_failure = "forest " + std::to_string(n) +
                                      " class " + std::to_string(cls) +
                                      ": solver and oracle disagree";
            }
            ++summary.disagreements;
            continue;
          }
          if (got.sat && (!box.Contains(got.witness) ||
                          !target.Accepts(forest.PredictLabel(got.witness)))) {
            if (summary.ok()) {
              summary.first_failure = "forest " + std::to_string(n) +
                                      " class " + std::to_string(cls) +
                                      ": invalid witness";
            }
            ++summary.bad_witnesses;
          }
        }
      }
    }
  }
  return summary;
}

}  // namespace mucforest
