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

#include "mucforest/reach_solver.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mucforest/errors.h"

namespace mucforest {
namespace {

// Bound violations must exceed this before a branch is cut, so that
// floating-point summation order can never flip a decision.
constexpr double kPruneMargin = 1e-9;

bool Reachable(const ReachSolver::Leaf& leaf, const Box& box) {
  for (const auto& [feature, iv] : leaf.path) {
    if (box[feature].Intersect(iv).Empty()) return false;
  }
  return true;
}

void CollectLeaves(const Tree& tree, int id, std::vector<Interval>& bounds,
                   std::vector<int>& touched,
                   std::vector<ReachSolver::Leaf>& out) {
  const Node& node = tree.nodes[id];
  if (node.is_leaf()) {
    ReachSolver::Leaf leaf;
    leaf.node = id;
    leaf.probs = &node.probs;
    std::vector<int> features = touched;
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()),
                   features.end());
    for (int f : features) leaf.path.emplace_back(f, bounds[f]);
    out.push_back(std::move(leaf));
    return;
  }
  const int f = node.feature;
  const Interval saved = bounds[f];
  touched.push_back(f);
  bounds[f] = saved.Intersect(Interval::AtMost(node.threshold));
  if (!bounds[f].Empty()) CollectLeaves(tree, node.left, bounds, touched, out);
  bounds[f] = saved.Intersect(Interval::Above(node.threshold));
  if (!bounds[f].Empty()) CollectLeaves(tree, node.right, bounds, touched, out);
  bounds[f] = saved;
  touched.pop_back();
}

}  // namespace

class ReachSolver::Search {
 public:
  Search(const ReachSolver& solver, Box box, Target target, SolverStats* stats)
      : solver_(solver),
        forest_(solver.forest_),
        box_(std::move(box)),
        target_(target),
        stats_(stats),
        n_trees_(static_cast<int>(forest_.n_trees())),
        n_classes_(forest_.n_classes()) {}

  SatResult Run() {
    if (box_.Empty()) return SatResult::Unsat();
    // Leaves reachable in the query box, per tree.
    std::vector<std::vector<const Leaf*>> live(n_trees_);
    for (int t = 0; t < n_trees_; ++t) {
      for (const Leaf& leaf : solver_.leaves_[t]) {
        if (Reachable(leaf, box_)) live[t].push_back(&leaf);
      }
    }
    std::vector<double> sums(n_classes_, 0.0);
    if (Visit(0, live, sums)) return SatResult::Sat(std::move(witness_));
    return SatResult::Unsat();
  }

 private:
  // Margin of the target class against `other` contributed by one leaf:
  //   kNotClass: p[other] - p[c]   (some other class must catch up)
  //   kIsClass:  p[c] - p[other]   (c must stay ahead of every other class)
  double LeafMargin(const std::vector<double>& p, int other) const {
    const int c = target_.cls;
    return target_.kind == Target::Kind::kNotClass ? p[other] - p[c]
                                                   : p[c] - p[other];
  }

  // True when no completion of the partial sum can satisfy the target.
  bool Hopeless(int level, const std::vector<std::vector<const Leaf*>>& live,
                const std::vector<double>& sums) const {
    const int c = target_.cls;
    const bool not_class = target_.kind == Target::Kind::kNotClass;
    for (int j = 0; j < n_classes_; ++j) {
      if (j == c) continue;
      double bound = not_class ? sums[j] - sums[c] : sums[c] - sums[j];
      for (int t = level; t < n_trees_; ++t) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Leaf* leaf : live[t]) {
          best = std::max(best, LeafMargin(*leaf->probs, j));
        }
        bound += best;
      }
      const bool feasible = bound >= -kPruneMargin;
      // kNotClass needs one feasible rival; kIsClass needs all rivals beaten.
      if (not_class && feasible) return false;
      if (!not_class && !feasible) return true;
    }
    return not_class;
  }

  double Priority(const Leaf& leaf) const {
    double score = target_.kind == Target::Kind::kNotClass
                       ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_classes_; ++j) {
      if (j == target_.cls) continue;
      const double m = LeafMargin(*leaf.probs, j);
      score = target_.kind == Target::Kind::kNotClass ? std::max(score, m)
                                                      : std::min(score, m);
    }
    return score;
  }

  bool Visit(int level, const std::vector<std::vector<const Leaf*>>& live,
             const std::vector<double>& sums) {
    if (stats_) ++stats_->nodes;
    if (level == n_trees_) {
      std::vector<double> mean(sums);
      for (double& v : mean) v /= static_cast<double>(n_trees_);
      if (!target_.Accepts(ArgmaxLowest(mean))) return false;
      witness_ = box_.PickPoint();
      return true;
    }
    if (Hopeless(level, live, sums)) {
      if (stats_) ++stats_->pruned;
      return false;
    }

    std::vector<const Leaf*> order = live[level];
    std::stable_sort(order.begin(), order.end(),
                     [this](const Leaf* a, const Leaf* b) {
                       return Priority(*a) > Priority(*b);
                     });

    std::vector<std::pair<int, Interval>> saved;
    std::vector<std::vector<const Leaf*>> next(n_trees_);
    std::vector<double> next_sums(n_classes_);
    for (const Leaf* leaf : order) {
      saved.clear();
      for (const auto& [f, iv] : leaf->path) {
        saved.emplace_back(f, box_[f]);
        box_[f] = box_[f].Intersect(iv);
      }
      for (int t = level + 1; t < n_trees_; ++t) {
        next[t].clear();
        for (const Leaf* other : live[t]) {
          if (Reachable(*other, box_)) next[t].push_back(other);
        }
      }
      for (int c = 0; c < n_classes_; ++c) {
        next_sums[c] = sums[c] + (*leaf->probs)[c];
      }
      const bool found = Visit(level + 1, next, next_sums);
      for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
        box_[it->first] = it->second;
      }
      if (found) return true;
    }
    return false;
  }

  const ReachSolver& solver_;
  const Forest& forest_;
  Box box_;
  Target target_;
  SolverStats* stats_;
  int n_trees_;
  int n_classes_;
  std::vector<double> witness_;
};

ReachSolver::ReachSolver(const Forest& forest) : forest_(forest) {
  leaves_.resize(forest.n_trees());
  for (std::size_t t = 0; t < forest.n_trees(); ++t) {
    const Tree& tree = forest.trees()[t];
    std::vector<Interval> bounds(forest.n_features(), Interval::All());
    std::vector<int> touched;
    CollectLeaves(tree, tree.root, bounds, touched, leaves_[t]);
  }
}

SatResult ReachSolver::Decide(const Box& box, Target target,
                              SolverStats* stats) const {
  if (box.size() != forest_.n_features()) {
    throw InputError("box has " + std::to_string(box.size()) +
                     " features, model expects " +
                     std::to_string(forest_.n_features()));
  }
  if (target.cls < 0 || target.cls >= forest_.n_classes()) {
    throw InputError("target class out of range");
  }
  return Search(*this, box, target, stats).Run();
}

SatResult DecideReachable(const Forest& forest, const Box& box,
                          Target target) {
  return ReachSolver(forest).Decide(box, target);
}

std::vector<Cell> EnumerateCells(const Forest& forest, const Box& box,
                                 std::size_t max_cells) {
  const int d = forest.n_features();
  if (box.size() != d) throw InputError("box dimension mismatch");
  if (box.Empty()) return {};

  // Per-feature slabs cut by the thresholds that actually split the interval.
  std::vector<std::vector<Interval>> slabs(d);
  std::size_t total = 1;
  for (int f = 0; f < d; ++f) {
    Interval rest = box[f];
    for (double t : forest.Thresholds(f)) {
      const Interval below = rest.Intersect(Interval::AtMost(t));
      const Interval above = rest.Intersect(Interval::Above(t));
      if (below.Empty() || above.Empty()) continue;
      slabs[f].push_back(below);
      rest = above;
    }
    slabs[f].push_back(rest);
    if (total > max_cells / slabs[f].size()) {
      throw OracleTooLargeError("threshold grid exceeds " +
                                std::to_string(max_cells) + " cells");
    }
    total *= slabs[f].size();
  }
  if (total > max_cells) {
    throw OracleTooLargeError("threshold grid exceeds " +
                              std::to_string(max_cells) + " cells");
  }

  std::vector<Cell> cells;
  cells.reserve(total);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<Interval> ivs(d);
    for (int f = 0; f < d; ++f) ivs[f] = slabs[f][digit[f]];
    Cell cell{Box(std::move(ivs)), 0};
    cell.label = forest.PredictLabel(cell.box.PickPoint());
    cells.push_back(std::move(cell));
    for (int f = 0; f < d; ++f) {
      if (++digit[f] < slabs[f].size()) break;
      digit[f] = 0;
    }
  }
  return cells;
}

}  // namespace mucforest
