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

#ifndef MUCFOREST_REACH_SOLVER_H_
#define MUCFOREST_REACH_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mucforest/box.h"
#include "mucforest/forest.h"

namespace mucforest {

// Output condition of a reachability query.
struct Target {
  enum class Kind { kIsClass, kNotClass };

  Kind kind = Kind::kNotClass;
  int cls = 0;

  static Target Is(int c) { return {Kind::kIsClass, c}; }
  static Target Not(int c) { return {Kind::kNotClass, c}; }

  bool Accepts(int label) const {
    return kind == Kind::kIsClass ? label == cls : label != cls;
  }
};

struct SatResult {
  bool sat = false;
  // A point inside the query box whose prediction satisfies the target.
  // Empty when unsat.
  std::vector<double> witness;

  static SatResult Unsat() { return {}; }
  static SatResult Sat(std::vector<double> w) { return {true, std::move(w)}; }
};

struct SolverStats {
  std::uint64_t nodes = 0;    // partial leaf combinations visited
  std::uint64_t pruned = 0;   // combinations cut by the vote bound
};

// Exact decision procedure for "is there an x in the box whose forest
// prediction satisfies the target". Depth-first search over one reachable
// leaf per tree, in stored tree order, narrowing the box by each leaf's path
// conditions. Partial combinations are cut when an upper bound on the final
// vote margin, taken over the leaves still reachable in the remaining trees,
// shows the target cannot be met.
//
// Holds a reference to the forest, which must outlive the solver. Decide()
// is const and keeps all search state local, so one solver may serve
// concurrent queries.
class ReachSolver {
 public:
  explicit ReachSolver(const Forest& forest);

  SatResult Decide(const Box& box, Target target,
                   SolverStats* stats = nullptr) const;

  const Forest& forest() const { return forest_; }

  struct Leaf {
    int node = -1;
    const std::vector<double>* probs = nullptr;
    // Conjunction of the split conditions on the root-to-leaf path, merged
    // per feature.
    std::vector<std::pair<int, Interval>> path;
  };

 private:
  class Search;

  const Forest& forest_;
  std::vector<std::vector<Leaf>> leaves_;  // per tree
};

// One-shot convenience wrapper.
SatResult DecideReachable(const Forest& forest, const Box& box, Target target);

struct Cell {
  Box box;
  int label = 0;
};

// Partitions `box` by the grid of every split threshold that cuts it and
// labels each cell with the forest's (constant) prediction on it. This is a
// brute-force reference for ReachSolver. Throws OracleTooLargeError when the
// grid has more than `max_cells` cells.
std::vector<Cell> EnumerateCells(const Forest& forest, const Box& box,
                                 std::size_t max_cells = 200000);

}  // namespace mucforest

#endif  // MUCFOREST_REACH_SOLVER_H_
