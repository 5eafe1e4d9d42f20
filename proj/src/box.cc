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

#include "mucforest/box.h"

#include <cmath>
#include <sstream>

#include "mucforest/errors.h"

namespace mucforest {

bool Interval::Empty() const {
  if (lo > hi) return true;
  return lo == hi && (lo_open || hi_open);
}

bool Interval::Contains(double v) const {
  const bool above = lo_open ? v > lo : v >= lo;
  const bool below = hi_open ? v < hi : v <= hi;
  return above && below;
}

bool Interval::IsSubsetOf(const Interval& other) const {
  if (Empty()) return true;
  const bool lo_ok =
      lo > other.lo || (lo == other.lo && (lo_open || !other.lo_open));
  const bool hi_ok =
      hi < other.hi || (hi == other.hi && (hi_open || !other.hi_open));
  return lo_ok && hi_ok;
}

Interval Interval::Intersect(const Interval& other) const {
  Interval out = *this;
  if (other.lo > out.lo || (other.lo == out.lo && other.lo_open)) {
    out.lo = other.lo;
    out.lo_open = other.lo_open;
  }
  if (other.hi < out.hi || (other.hi == out.hi && other.hi_open)) {
    out.hi = other.hi;
    out.hi_open = other.hi_open;
  }
  return out;
}

double Interval::PickPoint() const {
  if (Empty()) throw InputError("PickPoint on empty interval " + ToString());
  double v;
  if (lo == hi) {
    v = lo;
  } else if (std::isinf(lo) && std::isinf(hi)) {
    v = 0.0;
  } else if (std::isinf(lo)) {
    v = hi - 1.0;
  } else if (std::isinf(hi)) {
    v = lo + 1.0;
  } else {
    v = lo + (hi - lo) / 2.0;
  }
  // Adjacent doubles or huge magnitudes can land the candidate on an open
  // end; step one ulp inward.
  if (!Contains(v)) v = std::nextafter(lo, kInf);
  if (!Contains(v)) v = std::nextafter(hi, -kInf);
  return v;
}

std::string Interval::ToString() const {
  std::ostringstream out;
  out.precision(17);
  out << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
  return out.str();
}

Box Box::Unbounded(int n_features) {
  return Box(std::vector<Interval>(n_features, Interval::All()));
}

Box Box::Point(std::span<const double> x) {
  std::vector<Interval> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(Interval::Point(v));
  return Box(std::move(out));
}

Box Box::Around(std::span<const double> x, std::span<const double> tau) {
  if (x.size() != tau.size()) throw InputError("Box::Around size mismatch");
  std::vector<Interval> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.push_back(Interval::Closed(x[i] - tau[i], x[i] + tau[i]));
  }
  return Box(std::move(out));
}

bool Box::Empty() const {
  for (const auto& iv : intervals_) {
    if (iv.Empty()) return true;
  }
  return false;
}

bool Box::Contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (!intervals_[i].Contains(x[i])) return false;
  }
  return true;
}

bool Box::IsSubsetOf(const Box& other) const {
  if (Empty()) return true;
  for (int i = 0; i < size(); ++i) {
    if (!intervals_[i].IsSubsetOf(other[i])) return false;
  }
  return true;
}

Box Box::Intersect(const Box& other) const {
  if (other.size() != size()) throw InputError("Box::Intersect size mismatch");
  std::vector<Interval> out(intervals_);
  for (int i = 0; i < size(); ++i) out[i] = out[i].Intersect(other[i]);
  return Box(std::move(out));
}

std::vector<double> Box::PickPoint() const {
  std::vector<double> out;
  out.reserve(intervals_.size());
  for (const auto& iv : intervals_) out.push_back(iv.PickPoint());
  return out;
}

}  // namespace mucforest
