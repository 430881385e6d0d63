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

// SVG output for instances and solutions. Shapes become one polygon each
// (outline of the rectangle stack), segments become lines. The y axis is
// flipped so larger y is drawn higher.

#ifndef STABKIT_SVG_HPP_
#define STABKIT_SVG_HPP_

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/geometry.hpp"

namespace stabkit {

// Outline of a stack of rectangles: up the right side, down the left side.
// Collinear and repeated vertices are dropped.
inline std::vector<std::pair<Coord, Coord>> shape_outline(const KShape& shape) {
  std::vector<Rect> rects = shape.rects;
  std::sort(rects.begin(), rects.end(),
            [](const Rect& a, const Rect& b) { return a.yb < b.yb; });
  std::vector<std::pair<Coord, Coord>> walk;
  for (const Rect& r : rects) {
    walk.emplace_back(r.xr, r.yb);
    walk.emplace_back(r.xr, r.yt);
  }
  for (auto it = rects.rbegin(); it != rects.rend(); ++it) {
    walk.emplace_back(it->xl, it->yt);
    walk.emplace_back(it->xl, it->yb);
  }
  std::vector<std::pair<Coord, Coord>> pts;
  for (const auto& p : walk) {
    if (pts.empty() || pts.back() != p) pts.push_back(p);
  }
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  // drop middle points of straight runs (cyclically)
  bool changed = true;
  while (changed && pts.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[(i + pts.size() - 1) % pts.size()];
      const auto& b = pts[i];
      const auto& c = pts[(i + 1) % pts.size()];
      if ((a.first == b.first && b.first == c.first) ||
          (a.second == b.second && b.second == c.second)) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return pts;
}

inline std::string render_svg(const Instance& inst, const std::optional<Solution>& sol = {}) {
  Coord x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  auto grow = [&](const Coord& xl, const Coord& xr, const Coord& yb, const Coord& yt) {
    if (first) {
      x0 = xl, x1 = xr, y0 = yb, y1 = yt;
      first = false;
      return;
    }
    x0 = std::min(x0, xl), x1 = std::max(x1, xr);
    y0 = std::min(y0, yb), y1 = std::max(y1, yt);
  };
  for (const KShape& k : inst.shapes) {
    Rect b = bounding_rect(k);
    grow(b.xl, b.xr, b.yb, b.yt);
  }
  if (sol) {
    for (const HSegment& s : sol->segments) grow(s.xl, s.xr, s.y, s.y);
  }
  Coord w = x1 - x0, h = y1 - y0;
  if (sgn(w) == 0) w = 1;
  if (sgn(h) == 0) h = 1;
  const Coord mx = w / 20, my = h / 20;
  const Coord left = x0 - mx, top = y1 + my;
  auto X = [&](const Coord& x) { return format_decimal(x, 6); };
  auto Y = [&](const Coord& y) { return format_decimal(top - y, 6); };
  const Coord stroke = std::min(w, h) / 200;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << X(left) << ' '
     << format_decimal(Coord(0), 6) << ' ' << format_decimal(w + 2 * mx, 6) << ' '
     << format_decimal(h + 2 * my, 6) << "\">\n";
  os << "<g fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"#3182bd\" stroke-width=\""
     << format_decimal(stroke, 6) << "\">\n";
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    os << "<polygon data-shape=\"" << i << "\" points=\"";
    bool sep = false;
    for (const auto& [x, y] : shape_outline(inst.shapes[i])) {
      os << (sep ? " " : "") << X(x) << ',' << Y(y);
      sep = true;
    }
    os << "\"/>\n";
  }
  os << "</g>\n";
  if (sol) {
    os << "<g stroke=\"#d62728\" stroke-width=\"" << format_decimal(2 * stroke, 6) << "\">\n";
    for (const HSegment& s : sol->segments) {
      os << "<line x1=\"" << X(s.xl) << "\" y1=\"" << Y(s.y) << "\" x2=\"" << X(s.xr)
         << "\" y2=\"" << Y(s.y) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stabkit

#endif  // STABKIT_SVG_HPP_
