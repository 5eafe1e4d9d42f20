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

#ifndef MUCFOREST_BOX_H_
#define MUCFOREST_BOX_H_

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mucforest {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A real interval with independently open or closed ends. Infinite ends are
// always open.
struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = true;
  bool hi_open = true;

  static Interval All() { return {}; }
  static Interval Point(double v) { return {v, v, false, false}; }
  static Interval Closed(double lo, double hi) { return {lo, hi, false, false}; }
  // (-inf, t]: the left branch of a split on t.
  static Interval AtMost(double t) { return {-kInf, t, true, false}; }
  // (t, +inf): the right branch of a split on t.
  static Interval Above(double t) { return {t, kInf, true, true}; }

  bool Empty() const;
  bool Contains(double v) const;
  bool IsPoint() const { return lo == hi && !Empty(); }
  bool IsSubsetOf(const Interval& other) const;
  Interval Intersect(const Interval& other) const;

  // A representative member: the point itself for degenerate intervals, the
  // midpoint for bounded ones, one unit inside the finite end of a half-line,
  // and 0 for the whole line. Requires !Empty().
  double PickPoint() const;

  std::string ToString() const;

  bool operator==(const Interval&) const = default;
};

// Axis-aligned box: one interval per feature.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> intervals)
      : intervals_(std::move(intervals)) {}

  static Box Unbounded(int n_features);
  static Box Point(std::span<const double> x);
  // [x - tau, x + tau] per feature, closed.
  static Box Around(std::span<const double> x, std::span<const double> tau);

  int size() const { return static_cast<int>(intervals_.size()); }
  const Interval& operator[](int i) const { return intervals_[i]; }
  Interval& operator[](int i) { return intervals_[i]; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  bool Empty() const;
  bool Contains(std::span<const double> x) const;
  bool IsSubsetOf(const Box& other) const;
  Box Intersect(const Box& other) const;
  std::vector<double> PickPoint() const;

  bool operator==(const Box&) const = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace mucforest

#endif  // MUCFOREST_BOX_H_
