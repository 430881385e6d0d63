// Copyright 2026 The stabkit Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Geometric primitives for stabbing stacked-rectangle shapes with horizontal
// segments. Everything here is exact: coordinates are rationals and the
// predicates never round.

#ifndef STABKIT_GEOMETRY_HPP_
#define STABKIT_GEOMETRY_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stabkit/rational.hpp"

namespace stabkit {

// Closed axis-aligned rectangle [xl, xr] x [yb, yt].
struct Rect {
  Coord xl, xr, yb, yt;

  Coord width() const { return xr - xl; }
  Coord height() const { return yt - yb; }

  bool contains(const Rect& other) const {
    return xl <= other.xl && other.xr <= xr && yb <= other.yb &&
           other.yt <= yt;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Horizontal closed segment [xl, xr] x {y}. Its cost is its length.
struct HSegment {
  Coord xl, xr, y;

  Coord length() const { return xr - xl; }

  friend bool operator==(const HSegment&, const HSegment&) = default;
  friend bool operator<(const HSegment& a, const HSegment& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.xl != b.xl) return a.xl < b.xl;
    return a.xr < b.xr;
  }
};

// Stack of rectangles, bottom to top. Use validate_kshape() to check the
// adjacency and containment rules; the struct itself does not enforce them.
struct KShape {
  std::vector<Rect> rects;

  std::size_t size() const { return rects.size(); }

  Coord w_min() const {
    Coord w = rects.front().width();
    for (const Rect& r : rects) w = std::min<Coord>(w, r.width());
    return w;
  }
  Coord w_max() const {
    Coord w = rects.front().width();
    for (const Rect& r : rects) w = std::max<Coord>(w, r.width());
    return w;
  }

  friend bool operator==(const KShape&, const KShape&) = default;
};

struct Instance {
  int k = 1;
  std::vector<KShape> shapes;

  std::size_t size() const { return shapes.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Solution {
  std::vector<HSegment> segments;
  Coord cost = 0;

  static Solution from_segments(std::vector<HSegment> segments) {
    Solution s;
    s.segments = std::move(segments);
    for (const HSegment& seg : s.segments) s.cost += seg.length();
    return s;
  }

  void add(const HSegment& seg) {
    segments.push_back(seg);
    cost += seg.length();
  }

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string message() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v;
    }
    return out;
  }
};

struct ValidateOptions {
  std::optional<int> k;
  bool allow_degenerate = false;
};

// Checks the stacking rules: consecutive rectangles touch exactly
// (top of one is the bottom of the next) and one shared edge contains the
// other. Rect indices in messages are 1-based.
inline ValidationReport validate_kshape(const KShape& shape,
                                        const ValidateOptions& options = {}) {
  ValidationReport report;
  if (shape.rects.empty()) {
    report.violations.push_back("shape has no rectangles");
    return report;
  }
  if (options.k && static_cast<int>(shape.rects.size()) > *options.k) {
    report.violations.push_back("shape has " +
                                std::to_string(shape.rects.size()) +
                                " rects, more than k=" +
                                std::to_string(*options.k));
  }
  for (std::size_t i = 0; i < shape.rects.size(); ++i) {
    const Rect& r = shape.rects[i];
    std::string idx = std::to_string(i + 1);
    if (r.xl > r.xr || r.yb > r.yt) {
      report.violations.push_back("rect " + idx + " has inverted bounds");
    } else if (!options.allow_degenerate &&
               (r.xl == r.xr || r.yb == r.yt)) {
      report.violations.push_back("rect " + idx + " is degenerate");
    }
  }
  for (std::size_t i = 0; i + 1 < shape.rects.size(); ++i) {
    const Rect& lo = shape.rects[i];
    const Rect& hi = shape.rects[i + 1];
    std::string pair =
        std::to_string(i + 1) + " and " + std::to_string(i + 2);
    if (lo.yt != hi.yb) {
      report.violations.push_back("gap between rect " + pair);
      continue;
    }
    bool lo_in_hi = hi.xl <= lo.xl && lo.xr <= hi.xr;
    bool hi_in_lo = lo.xl <= hi.xl && hi.xr <= lo.xr;
    if (!lo_in_hi && !hi_in_lo) {
      report.violations.push_back("rects " + pair +
                                  ": neither edge contains the other");
    }
  }
  return report;
}

inline void require_valid(const KShape& shape) {
  ValidationReport report = validate_kshape(shape);
  if (!report.ok()) throw StabError("invalid k-shape: " + report.message());
}

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  if (inst.k < 1) report.violations.push_back("k must be positive");
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    ValidationReport r = validate_kshape(inst.shapes[i], {.k = inst.k});
    for (const auto& v : r.violations) {
      report.violations.push_back("shape " + std::to_string(i) + ": " + v);
    }
  }
  return report;
}

// True iff no interior rectangle is strictly wider than both neighbours.
inline bool is_hourglass(const KShape& shape) {
  require_valid(shape);
  for (std::size_t i = 1; i + 1 < shape.rects.size(); ++i) {
    Coord w = shape.rects[i].width();
    if (shape.rects[i - 1].width() < w && shape.rects[i + 1].width() < w) {
      return false;
    }
  }
  return true;
}

// A segment stabs a rectangle when it crosses it wall to wall; boundary
// heights y == yb and y == yt count.
inline bool stabs_rect(const HSegment& s, const Rect& r) {
  return s.xl <= r.xl && r.xr <= s.xr && r.yb <= s.y && s.y <= r.yt;
}

inline bool stabs_kshape(const HSegment& s, const KShape& shape) {
  return std::any_of(shape.rects.begin(), shape.rects.end(),
                     [&](const Rect& r) { return stabs_rect(s, r); });
}

inline bool stabbed_by_any(const KShape& shape,
                           const std::vector<HSegment>& segments) {
  return std::any_of(segments.begin(), segments.end(),
                     [&](const HSegment& s) { return stabs_kshape(s, shape); });
}

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::size_t> unstabbed;
  Coord cost = 0;
};

// Recomputes cost and lists unstabbed shapes. Throws when sol.cost disagrees
// with the segment lengths.
inline FeasibilityReport verify_solution(const Instance& inst,
                                         const Solution& sol) {
  FeasibilityReport report;
  for (const HSegment& s : sol.segments) report.cost += s.length();
  if (report.cost != sol.cost) {
    throw StabError("cost field inconsistent: declared " +
                    format_coord(sol.cost) + ", segments sum to " +
                    format_coord(report.cost));
  }
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    if (!stabbed_by_any(inst.shapes[i], sol.segments)) {
      report.unstabbed.push_back(i);
    }
  }
  report.feasible = report.unstabbed.empty();
  return report;
}

// Minimal axis-aligned box holding every rectangle of the shape.
inline Rect bounding_rect(const KShape& shape) {
  Rect box = shape.rects.front();
  for (const Rect& r : shape.rects) {
    box.xl = std::min<Coord>(box.xl, r.xl);
    box.xr = std::max<Coord>(box.xr, r.xr);
    box.yb = std::min<Coord>(box.yb, r.yb);
    box.yt = std::max<Coord>(box.yt, r.yt);
  }
  return box;
}

struct WidthStats {
  Coord w_min, w_max, w_range;
};

inline WidthStats width_stats(const std::vector<KShape>& shapes) {
  if (shapes.empty()) throw StabError("width_stats of an empty shape set");
  WidthStats stats{shapes.front().w_min(), shapes.front().w_max(), 0};
  Coord lo = shapes.front().rects.front().xl;
  Coord hi = shapes.front().rects.front().xr;
  for (const KShape& k : shapes) {
    stats.w_min = std::min<Coord>(stats.w_min, k.w_min());
    stats.w_max = std::max<Coord>(stats.w_max, k.w_max());
    for (const Rect& r : k.rects) {
      lo = std::min<Coord>(lo, r.xl);
      hi = std::max<Coord>(hi, r.xr);
    }
  }
  stats.w_range = hi - lo;
  return stats;
}

inline WidthStats width_stats(const Instance& inst) {
  return width_stats(inst.shapes);
}

// Smallest x-interval [lo, hi] holding the shape.
inline std::pair<Coord, Coord> x_extent(const KShape& shape) {
  Coord lo = shape.rects.front().xl, hi = shape.rects.front().xr;
  for (const Rect& r : shape.rects) {
    lo = std::min<Coord>(lo, r.xl);
    hi = std::max<Coord>(hi, r.xr);
  }
  return {lo, hi};
}

inline std::pair<Coord, Coord> y_extent(const KShape& shape) {
  Coord lo = shape.rects.front().yb, hi = shape.rects.front().yt;
  for (const Rect& r : shape.rects) {
    lo = std::min<Coord>(lo, r.yb);
    hi = std::max<Coord>(hi, r.yt);
  }
  return {lo, hi};
}

inline KShape translate(const KShape& shape, const Coord& dx, const Coord& dy) {
  KShape out = shape;
  for (Rect& r : out.rects) {
    r.xl += dx;
    r.xr += dx;
    r.yb += dy;
    r.yt += dy;
  }
  return out;
}

inline KShape scale_x(const KShape& shape, const Coord& factor) {
  KShape out = shape;
  for (Rect& r : out.rects) {
    r.xl *= factor;
    r.xr *= factor;
  }
  return out;
}

}  // namespace stabkit

#endif  // STABKIT_GEOMETRY_HPP_
