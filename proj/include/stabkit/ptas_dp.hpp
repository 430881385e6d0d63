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

// Dynamic program over discrete cells for shapes with bounded width ratio:
// discretization of the input, the hierarchical shifted grid, the trivial /
// add / line operations, and an executable replay of the level schedule
// that checks the live-set bound.

#ifndef STABKIT_PTAS_DP_HPP_
#define STABKIT_PTAS_DP_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/cover.hpp"
#include "stabkit/decompose.hpp"
#include "stabkit/geometry.hpp"
#include "stabkit/lp_approx.hpp"

namespace stabkit {

// eps^e for any integer e.
inline Coord eps_pow(const Coord& eps, int e) {
  return e >= 0 ? rational_pow(eps, static_cast<unsigned>(e))
                : rational_pow(1 / eps, static_cast<unsigned>(-e));
}

// The unique d with eps^3 / n < eps^d <= eps^2 / n.
inline int discrete_exponent(const Coord& eps, std::size_t n) {
  if (sgn(eps) <= 0 || eps >= 1) throw StabError("epsilon must lie in (0, 1)");
  if (n == 0) throw StabError("discrete_exponent: n must be positive");
  const Coord upper = eps * eps / Coord(static_cast<long>(n));
  int d = 0;
  Coord p = 1;
  while (p > upper) {
    p *= eps;
    ++d;
  }
  return d;
}

struct PtasParams {
  Coord eps;
  Coord alpha = 1;
  int d = 0;
  std::size_t add_cap = 1;
  Coord offset = 0;             // r, a multiple of eps^d in [0, alpha eps^-2]
  int line_level_cap = 2;       // line operations use grid levels <= this
  std::optional<std::uint64_t> cell_budget;
  RectStabber stabber = RectStabber::kExact;

  Coord grid() const { return rational_pow(eps, static_cast<unsigned>(d)); }
  // 3 eps^-3, rounded down.
  std::size_t live_cap() const {
    return static_cast<std::size_t>(floor_int(3 * eps_pow(eps, -3)).get_ui());
  }
  // Level j grid: x = r + t * alpha eps^(j-2).
  Coord spacing(int level) const { return alpha * eps_pow(eps, level - 2); }
};

// Parameters for an n-shape instance; add_cap defaults to the theoretical
// eps^-3.
inline PtasParams make_params(const Coord& eps, std::size_t n, const Coord& alpha = 1,
                              std::optional<std::size_t> add_cap = std::nullopt) {
  PtasParams p;
  p.eps = eps;
  p.alpha = alpha;
  p.d = discrete_exponent(eps, n);
  p.add_cap = add_cap ? *add_cap
                      : static_cast<std::size_t>(floor_int(eps_pow(eps, -3)).get_ui());
  return p;
}

inline void validate_params(const PtasParams& p, std::size_t n) {
  if (sgn(p.eps) <= 0 || p.eps > Coord(1, 2)) {
    throw StabError("ptas: epsilon must lie in (0, 1/2]");
  }
  if (p.alpha < 1) throw StabError("ptas: alpha must be >= 1");
  if (p.d != discrete_exponent(p.eps, n)) {
    throw StabError("ptas: d must satisfy eps^3/n < eps^d <= eps^2/n");
  }
  if (p.add_cap < 1) throw StabError("ptas: add_cap must be >= 1");
  if (!is_multiple_of(p.offset, p.grid()) || sgn(p.offset) < 0 ||
      p.offset > p.alpha * eps_pow(p.eps, -2)) {
    throw StabError("ptas: offset must be a multiple of eps^d in [0, alpha eps^-2]");
  }
}

// Level j with alpha eps^j < len <= alpha eps^(j-1); nullopt when len is
// longer than alpha / eps or not positive. May exceed d - 1 for short
// segments.
inline std::optional<int> level_of(const Coord& len, const PtasParams& p) {
  if (sgn(len) <= 0 || len > p.alpha / p.eps) return std::nullopt;
  int j = 0;
  Coord lower = p.alpha;
  while (len <= lower) {
    lower *= p.eps;
    ++j;
  }
  return j;
}

inline bool on_grid(const Coord& x, int level, const PtasParams& p) {
  return is_multiple_of(x - p.offset, p.spacing(level));
}

// Moves both endpoints outward to grid lines of level j + 3.
inline HSegment well_align(const HSegment& seg, const PtasParams& p) {
  std::optional<int> j = level_of(seg.length(), p);
  if (!j || *j >= p.d) {
    throw StabError("well_align: segment length " + format_coord(seg.length()) +
                    " is outside levels 0.." + std::to_string(p.d - 1));
  }
  if (floor_int(seg.y) != seg.y) {
    throw StabError("well_align: y = " + format_coord(seg.y) + " is not discrete");
  }
  const Coord s = p.spacing(*j + 3);
  return HSegment{p.offset + floor_to_grid(seg.xl - p.offset, s),
                  p.offset + ceil_to_grid(seg.xr - p.offset, s), seg.y};
}

inline bool is_well_aligned(const HSegment& seg, const PtasParams& p) {
  std::optional<int> j = level_of(seg.length(), p);
  return j && *j < p.d && floor_int(seg.y) == seg.y && on_grid(seg.xl, *j + 3, p) &&
         on_grid(seg.xr, *j + 3, p);
}

// Aligns repeatedly until the segment is well-aligned for its own level
// (growing a segment can move it to a coarser level).
inline HSegment align_to_fixpoint(HSegment seg, const PtasParams& p) {
  for (int guard = 0; guard <= p.d + 4; ++guard) {
    if (is_well_aligned(seg, p)) return seg;
    seg = well_align(seg, p);
  }
  throw StabError("align_to_fixpoint: no fixpoint");
}

// Cuts every segment longer than alpha / eps into pieces of length
// alpha / eps - 2 alpha from the left end, then widens each piece to cover
// the rectangles the original segment stabbed and the piece overlaps.
// Pieces stay at most alpha / eps long when no such rectangle is wider
// than alpha. Requires eps < 1/2.
inline Solution split_long_segments(const Solution& sol, const Coord& alpha,
                                    const Coord& eps, const Instance& inst) {
  const Coord piece = alpha / eps - 2 * alpha;
  if (sgn(piece) <= 0) throw StabError("split_long_segments: requires eps < 1/2");
  Solution out;
  for (const HSegment& seg : sol.segments) {
    if (seg.length() <= alpha / eps) {
      out.add(seg);
      continue;
    }
    std::vector<Rect> stabbed;
    for (const KShape& k : inst.shapes) {
      for (const Rect& r : k.rects) {
        if (stabs_rect(seg, r)) stabbed.push_back(r);
      }
    }
    for (Coord left = seg.xl; left < seg.xr; left += piece) {
      HSegment part{left, std::min<Coord>(left + piece, seg.xr), seg.y};
      HSegment grown = part;
      for (const Rect& r : stabbed) {
        if (r.xl < part.xr && r.xr > part.xl) {
          grown.xl = std::min<Coord>(grown.xl, r.xl);
          grown.xr = std::max<Coord>(grown.xr, r.xr);
        }
      }
      out.add(grown);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discretization

struct XBlock {
  Coord lo, hi;  // discrete coordinates
  Coord shift;   // discrete x = scaled x + shift
};

struct DiscreteInstance {
  Instance instance;
  Coord eps, alpha, beta;
  int d = 0;
  std::size_t input_size = 0;  // n of the input instance
  std::vector<Coord> y_levels; // discrete y -> original y
  std::vector<XBlock> blocks;
  std::vector<HSegment> pre_stabbed;        // original coordinates
  std::vector<std::size_t> original_index;  // residual shape -> input shape
  std::size_t discarded_parts = 0;

  Coord grid() const { return rational_pow(eps, static_cast<unsigned>(d)); }
  Coord box_width() const { return alpha * Coord(static_cast<long>(input_size)); }
  Coord box_height() const {
    return Coord(static_cast<long>((instance.k + 1) * static_cast<int>(input_size)));
  }
};

struct DiscretizeOptions {
  // Cost of a feasible solution; greedy_stab when absent.
  std::optional<Coord> cost;
};

namespace detail {

// Closes the gaps between connected components of the union of rectangle
// x-projections. No rectangle spans a gap, so splitting segments at gaps
// maps solutions in both directions without changing what they stab.
inline std::vector<XBlock> close_gaps(Instance& inst) {
  std::vector<std::pair<Coord, Coord>> spans;
  for (const KShape& k : inst.shapes) {
    for (const Rect& r : k.rects) spans.emplace_back(r.xl, r.xr);
  }
  std::sort(spans.begin(), spans.end());
  std::vector<XBlock> blocks;
  for (const auto& [lo, hi] : spans) {
    if (!blocks.empty() && lo <= blocks.back().hi) {
      blocks.back().hi = std::max<Coord>(blocks.back().hi, hi);
    } else {
      blocks.push_back(XBlock{lo, hi, 0});
    }
  }
  Coord next = 0;
  for (XBlock& b : blocks) {
    b.shift = next - b.lo;
    next += b.hi - b.lo;
  }
  for (KShape& k : inst.shapes) {
    for (Rect& r : k.rects) {
      for (const XBlock& b : blocks) {
        if (b.lo <= r.xl && r.xr <= b.hi) {
          r.xl += b.shift;
          r.xr += b.shift;
          break;
        }
      }
    }
  }
  for (XBlock& b : blocks) {
    b.lo += b.shift;
    b.hi += b.shift;
  }
  return blocks;
}

inline DiscreteInstance finish_discrete(DiscreteInstance out, Instance scaled) {
  out.blocks = close_gaps(scaled);
  YCompression yc = compress_y(scaled);
  out.instance = std::move(yc.instance);
  out.y_levels = std::move(yc.levels);
  return out;
}

}  // namespace detail

// Scales x by beta = (1 - 2 eps) alpha / C, pre-stabs shapes with
// w_min <= alpha eps / n, snaps rectangles outward to multiples of eps^d,
// drops rectangles wider than alpha, closes x-gaps and compresses y.
inline DiscreteInstance discretize(const Instance& inst, const Coord& eps,
                                   const Coord& alpha,
                                   const DiscretizeOptions& options = {}) {
  if (inst.shapes.empty()) throw StabError("discretize: empty instance");
  if (sgn(eps) <= 0 || eps >= Coord(1, 3)) {
    throw StabError("discretize: epsilon must lie in (0, 1/3)");
  }
  if (alpha < 1) throw StabError("discretize: alpha must be >= 1");
  const std::size_t n = inst.shapes.size();
  DiscreteInstance out;
  out.eps = eps;
  out.alpha = alpha;
  out.d = discrete_exponent(eps, n);
  out.input_size = n;
  const Coord c = options.cost ? *options.cost : greedy_stab(inst).cost;
  if (sgn(c) <= 0) throw StabError("discretize: solution cost must be positive");
  out.beta = (1 - 2 * eps) * alpha / c;
  const Coord g = out.grid();
  const Coord narrow = alpha * eps / Coord(static_cast<long>(n));

  Instance scaled;
  scaled.k = inst.k;
  for (std::size_t i = 0; i < n; ++i) {
    KShape s = scale_x(inst.shapes[i], out.beta);
    if (s.w_min() <= narrow) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < s.rects.size(); ++j) {
        if (s.rects[j].width() < s.rects[best].width()) best = j;
      }
      const Rect& r = inst.shapes[i].rects[best];
      out.pre_stabbed.push_back(HSegment{r.xl, r.xr, r.yb});
      continue;
    }
    KShape kept;
    for (Rect r : s.rects) {
      r.xl = floor_to_grid(r.xl, g);
      r.xr = ceil_to_grid(r.xr, g);
      if (r.width() > alpha) {
        ++out.discarded_parts;
      } else {
        kept.rects.push_back(r);
      }
    }
    if (kept.rects.empty()) {
      throw StabError("discretize: shape " + std::to_string(i) +
                      " lost every rectangle; the supplied cost is below the optimum");
    }
    scaled.shapes.push_back(std::move(kept));
    out.original_index.push_back(i);
  }
  return detail::finish_discrete(std::move(out), std::move(scaled));
}

// Wraps an instance that is already discrete for p (x on the eps^d grid,
// integer y): closes x-gaps and compresses y, nothing else.
inline DiscreteInstance lift_discrete(const Instance& inst, const PtasParams& p) {
  if (inst.shapes.empty()) throw StabError("lift_discrete: empty instance");
  DiscreteInstance out;
  out.eps = p.eps;
  out.alpha = p.alpha;
  out.beta = 1;
  out.d = p.d;
  out.input_size = inst.shapes.size();
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) out.original_index.push_back(i);
  const Coord g = out.grid();
  for (const KShape& k : inst.shapes) {
    for (const Rect& r : k.rects) {
      if (!is_multiple_of(r.xl, g) || !is_multiple_of(r.xr, g)) {
        throw StabError("lift_discrete: x-coordinate is not a multiple of eps^d");
      }
    }
  }
  return detail::finish_discrete(std::move(out), inst);
}

// Properties (i) to (iii) of a discretized instance.
inline ValidationReport check_discrete(const DiscreteInstance& di) {
  ValidationReport report;
  const Coord narrow = di.alpha * di.eps / Coord(static_cast<long>(di.input_size));
  const Coord g = di.grid();
  for (std::size_t i = 0; i < di.instance.shapes.size(); ++i) {
    const KShape& k = di.instance.shapes[i];
    const std::string tag = "shape " + std::to_string(i) + ": ";
    if (k.w_min() <= narrow) report.violations.push_back(tag + "w_min <= alpha eps / n");
    if (k.w_max() > di.alpha) report.violations.push_back(tag + "w_max > alpha");
    for (const Rect& r : k.rects) {
      if (!is_multiple_of(r.xl, g) || !is_multiple_of(r.xr, g) ||
          floor_int(r.yb) != r.yb || floor_int(r.yt) != r.yt) {
        report.violations.push_back(tag + "corner not discrete");
      }
      if (sgn(r.xl) < 0 || r.xr > di.box_width() || sgn(r.yb) < 0 ||
          r.yt > di.box_height()) {
        report.violations.push_back(tag + "outside [0, alpha n] x [0, (k+1) n]");
      }
    }
  }
  return report;
}

// Maps a solution of the discrete instance to the input instance: split at
// x-blocks, undo the block shift and the x scale, restore heights, then add
// the pre-stabbed segments.
inline Solution map_back(const DiscreteInstance& di, const Solution& sol) {
  Solution out;
  for (const HSegment& s : sol.segments) {
    mpz_class level = floor_int(s.y);
    if (level < 0) level = 0;
    if (level >= static_cast<long>(di.y_levels.size())) {
      level = static_cast<long>(di.y_levels.size()) - 1;
    }
    const Coord y = di.y_levels[static_cast<std::size_t>(level.get_si())];
    for (const XBlock& b : di.blocks) {
      Coord lo = std::max<Coord>(s.xl, b.lo);
      Coord hi = std::min<Coord>(s.xr, b.hi);
      if (lo >= hi) continue;
      out.add(HSegment{(lo - b.shift) / di.beta, (hi - b.shift) / di.beta, y});
    }
  }
  for (const HSegment& s : di.pre_stabbed) out.add(s);
  return out;
}

// Random instance with integer corners, widths in [1, alpha] (alpha an
// integer) and x inside [0, alpha n]. Nested placement as in gen_random.
inline Instance gen_discrete_instance(std::uint64_t seed, int n, int k, int alpha) {
  if (n < 1 || k < 1 || alpha < 1) throw StabError("gen_discrete_instance: bad sizes");
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int box = alpha * n;
  Instance inst;
  inst.k = k;
  for (int c = 0; c < n; ++c) {
    for (;;) {
      int rects = uni(1, k);
      std::vector<int> w(static_cast<std::size_t>(rects)), xl(w.size());
      for (int& v : w) v = uni(1, alpha);
      xl[0] = 0;
      for (std::size_t i = 1; i < w.size(); ++i) {
        int off = uni(0, std::abs(w[i] - w[i - 1]));
        xl[i] = w[i] <= w[i - 1] ? xl[i - 1] + off : xl[i - 1] - off;
      }
      int lo = *std::min_element(xl.begin(), xl.end()), hi = lo;
      for (std::size_t i = 0; i < w.size(); ++i) hi = std::max(hi, xl[i] + w[i]);
      if (hi - lo > box) continue;
      int shift = uni(0, box - (hi - lo)) - lo;
      int y = uni(0, 2 * n);
      KShape s;
      for (std::size_t i = 0; i < w.size(); ++i) {
        int h = uni(1, 2);
        s.rects.push_back(Rect{Coord(xl[i] + shift), Coord(xl[i] + shift + w[i]),
                               Coord(y), Coord(y + h)});
        y += h;
      }
      inst.shapes.push_back(std::move(s));
      break;
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Dynamic program

namespace detail {

// A DP cell: closed region plus live segments intersecting it. A live
// segment that spans the full width of the region on its top or bottom
// edge is kept as a flag instead; it stabs exactly the contained shapes
// touching that edge.
struct DpCell {
  Coord x1, x2, y1, y2;
  bool bottom = false, top = false;
  std::vector<HSegment> live;

  friend bool operator<(const DpCell& a, const DpCell& b) {
    if (a.x1 != b.x1) return a.x1 < b.x1;
    if (a.x2 != b.x2) return a.x2 < b.x2;
    if (a.y1 != b.y1) return a.y1 < b.y1;
    if (a.y2 != b.y2) return a.y2 < b.y2;
    if (a.bottom != b.bottom) return a.bottom < b.bottom;
    if (a.top != b.top) return a.top < b.top;
    return a.live < b.live;
  }
};

// Clips live segments to the cell, turns full-width edge segments into
// flags, drops empty and dominated segments, sorts.
inline void normalize(DpCell& c) {
  std::vector<HSegment> clipped;
  for (const HSegment& s : c.live) {
    if (s.y < c.y1 || s.y > c.y2) continue;
    HSegment t{std::max<Coord>(s.xl, c.x1), std::min<Coord>(s.xr, c.x2), s.y};
    if (t.xl >= t.xr) continue;
    if (t.xl == c.x1 && t.xr == c.x2) {
      if (t.y == c.y1) {
        c.bottom = true;
        continue;
      }
      if (t.y == c.y2) {
        c.top = true;
        continue;
      }
    }
    clipped.push_back(t);
  }
  std::sort(clipped.begin(), clipped.end());
  clipped.erase(std::unique(clipped.begin(), clipped.end()), clipped.end());
  std::vector<HSegment> out;
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < clipped.size() && !dominated; ++j) {
      dominated = j != i && clipped[j].y == clipped[i].y &&
                  clipped[j].xl <= clipped[i].xl && clipped[i].xr <= clipped[j].xr;
    }
    if ((c.bottom && clipped[i].y == c.y1) || (c.top && clipped[i].y == c.y2)) {
      dominated = true;
    }
    if (!dominated) out.push_back(clipped[i]);
  }
  c.live = std::move(out);
}

inline std::optional<std::size_t> spanning_live(const DpCell& c) {
  for (std::size_t i = 0; i < c.live.size(); ++i) {
    const HSegment& s = c.live[i];
    if (s.xl == c.x1 && s.xr == c.x2 && c.y1 < s.y && s.y < c.y2) return i;
  }
  return std::nullopt;
}

inline std::pair<DpCell, DpCell> split_horizontal(const DpCell& c, const Coord& y) {
  DpCell lo = c, hi = c;
  lo.y2 = y;
  lo.top = false;
  hi.y1 = y;
  hi.bottom = false;
  normalize(lo);
  normalize(hi);
  return {lo, hi};
}

inline std::pair<DpCell, DpCell> split_vertical(const DpCell& c, const Coord& x) {
  DpCell left = c, right = c;
  left.x2 = x;
  right.x1 = x;
  normalize(left);
  normalize(right);
  return {left, right};
}

}  // namespace detail

struct DpStats {
  std::uint64_t cells = 0;        // distinct cells evaluated
  std::uint64_t memo_hits = 0;
  std::uint64_t trivial_ops = 0;
  std::uint64_t add_ops = 0;      // add candidates evaluated
  std::uint64_t line_ops = 0;     // line candidates evaluated
  std::uint64_t rect_stab_calls = 0;
  std::size_t pool_size = 0;
};

struct DpResult {
  Solution solution;   // union of the chosen segments
  Coord dp_value;      // value stored at the root cell
  SolveStatus status = SolveStatus::kOptimal;
  DpStats stats;
};

namespace detail {

class DpSolver {
 public:
  DpSolver(const DiscreteInstance& di, const PtasParams& p) : di_(di), p_(p) {
    const Instance& inst = di.instance;
    for (const KShape& k : inst.shapes) boxes_.push_back(bounding_rect(k));
    std::set<HSegment> pool;
    CandidateSet cands = candidate_segments(inst);
    for (const HSegment& s : cands.segments) {
      pool.insert(s);
      try {
        pool.insert(well_align(s, p));
      } catch (const StabError&) {
        // length outside the level range: keep only the raw candidate
      }
    }
    for (const KShape& k : inst.shapes) {
      for (const Rect& r : k.rects) pool.insert(HSegment{r.xl, r.xr, r.yb});
    }
    for (const HSegment& s : pool) pool_.push_back(s);
    std::stable_sort(pool_.begin(), pool_.end(), [](const HSegment& a, const HSegment& b) {
      return a.length() < b.length();
    });
    for (const HSegment& s : pool_) pool_masks_.push_back(stab_mask(inst, s));
    stats_.pool_size = pool_.size();
    for (int j = 0; j <= std::min(p.d + 2, p.line_level_cap); ++j) levels_.push_back(j);
  }

  struct Value {
    Coord cost;
    std::vector<HSegment> segments;
  };

  Value solve(const DpCell& root) { return eval(root); }
  const DpStats& stats() const { return stats_; }

  struct BudgetExceeded {};

 private:
  bool contained(std::size_t i, const DpCell& c) const {
    const Rect& b = boxes_[i];
    return c.x1 <= b.xl && b.xr <= c.x2 && c.y1 <= b.yb && b.yt <= c.y2;
  }

  bool stabbed(std::size_t i, const DpCell& c) const {
    const KShape& k = di_.instance.shapes[i];
    for (const Rect& r : k.rects) {
      if (c.bottom && r.yb <= c.y1 && c.y1 <= r.yt) return true;
      if (c.top && r.yb <= c.y2 && c.y2 <= r.yt) return true;
    }
    for (const HSegment& s : c.live) {
      if (stabs_kshape(s, k)) return true;
    }
    return false;
  }

  std::vector<std::size_t> open_shapes(const DpCell& c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      if (contained(i, c) && !stabbed(i, c)) out.push_back(i);
    }
    return out;
  }

  const Solution& stab_boxes(const std::vector<std::size_t>& shapes) {
    auto it = line_cache_.find(shapes);
    if (it != line_cache_.end()) return it->second;
    std::vector<Rect> rects;
    for (std::size_t i : shapes) rects.push_back(boxes_[i]);
    ++stats_.rect_stab_calls;
    Solution s = rect_stab(rects, p_.stabber).solution;
    return line_cache_.emplace(shapes, std::move(s)).first->second;
  }

  std::vector<Coord> line_positions(const DpCell& c,
                                    const std::vector<std::size_t>& open) const {
    std::set<Coord> xs;
    for (std::size_t i : open) {
      for (const Rect& r : di_.instance.shapes[i].rects) {
        if (c.x1 < r.xl && r.xl < c.x2) xs.insert(r.xl);
        if (c.x1 < r.xr && r.xr < c.x2) xs.insert(r.xr);
      }
    }
    for (int j : levels_) {
      const Coord s = p_.spacing(j);
      for (Coord x = p_.offset + ceil_to_grid(c.x1 - p_.offset, s); x < c.x2; x += s) {
        if (x > c.x1) xs.insert(x);
      }
    }
    return {xs.begin(), xs.end()};
  }

  Value eval(const DpCell& c) {
    if (auto it = memo_.find(c); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
    ++stats_.cells;
    if (p_.cell_budget && stats_.cells > *p_.cell_budget) throw BudgetExceeded{};
    Value v = compute(c);
    memo_.emplace(c, v);
    return v;
  }

  Value compute(const DpCell& c) {
    std::vector<std::size_t> open = open_shapes(c);
    if (open.empty()) return Value{0, {}};

    if (auto t = spanning_live(c)) {
      ++stats_.trivial_ops;
      auto [lo, hi] = split_horizontal(c, c.live[*t].y);
      Value a = eval(lo), b = eval(hi);
      a.cost += b.cost;
      a.segments.insert(a.segments.end(), b.segments.begin(), b.segments.end());
      return a;
    }

    std::optional<Value> best;
    auto offer = [&](Value v) {
      if (!best || v.cost < best->cost) best = std::move(v);
    };

    // line operations
    for (const Coord& x : line_positions(c, open)) {
      std::vector<std::size_t> crossed;
      bool left = false, right = false;
      for (std::size_t i : open) {
        if (boxes_[i].xl < x && x < boxes_[i].xr) {
          crossed.push_back(i);
        } else if (boxes_[i].xr <= x) {
          left = true;
        } else {
          right = true;
        }
      }
      if (crossed.empty() && (!left || !right)) continue;
      ++stats_.line_ops;
      Value v{0, {}};
      if (!crossed.empty()) {
        const Solution& s = stab_boxes(crossed);
        v.cost = s.cost;
        v.segments = s.segments;
      }
      if (best && v.cost >= best->cost) continue;
      auto [l, r] = split_vertical(c, x);
      Value a = eval(l);
      if (best && v.cost + a.cost >= best->cost) continue;
      Value b = eval(r);
      v.cost += a.cost + b.cost;
      v.segments.insert(v.segments.end(), a.segments.begin(), a.segments.end());
      v.segments.insert(v.segments.end(), b.segments.begin(), b.segments.end());
      offer(std::move(v));
    }

    // add operations over the restricted pool
    ShapeMask open_mask(di_.instance.shapes.size());
    for (std::size_t i : open) open_mask.set(i);
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      const HSegment& s = pool_[i];
      if (c.x1 <= s.xl && s.xr <= c.x2 && c.y1 <= s.y && s.y <= c.y2 &&
          pool_masks_[i].intersects(open_mask)) {
        usable.push_back(i);
      }
    }
    const std::size_t room =
        c.live.size() >= p_.live_cap() ? 0 : p_.live_cap() - c.live.size();
    const std::size_t cap = std::min(p_.add_cap, room);
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, const Coord&)> extend = [&](std::size_t from,
                                                                const Coord& cost) {
      if (!chosen.empty()) {
        ++stats_.add_ops;
        DpCell child = c;
        for (std::size_t i : chosen) child.live.push_back(pool_[i]);
        normalize(child);
        Value rest = eval(child);
        Value v{cost + rest.cost, {}};
        for (std::size_t i : chosen) v.segments.push_back(pool_[i]);
        v.segments.insert(v.segments.end(), rest.segments.begin(), rest.segments.end());
        offer(std::move(v));
      }
      if (chosen.size() == cap) return;
      for (std::size_t u = from; u < usable.size(); ++u) {
        Coord next = cost + pool_[usable[u]].length();
        if (best && next >= best->cost) break;  // pool is sorted by length
        chosen.push_back(usable[u]);
        extend(u + 1, next);
        chosen.pop_back();
      }
    };
    extend(0, 0);

    if (!best) throw StabError("dp_solve: cell has no applicable operation");
    return *best;
  }

  const DiscreteInstance& di_;
  const PtasParams& p_;
  std::vector<Rect> boxes_;
  std::vector<HSegment> pool_;
  std::vector<ShapeMask> pool_masks_;
  std::vector<int> levels_;
  std::map<DpCell, Value> memo_;
  std::map<std::vector<std::size_t>, Solution> line_cache_;
  DpStats stats_;
};

}  // namespace detail

// Solves the discrete instance by the cell DP rooted at
// [0, alpha n] x [0, (k+1) n]. On budget exhaustion the greedy solution is
// returned with status budget_exceeded.
inline DpResult dp_solve(const DiscreteInstance& di, const PtasParams& params) {
  DpResult out;
  if (di.instance.shapes.empty()) {
    out.dp_value = 0;
    return out;
  }
  validate_params(params, di.input_size);
  detail::DpCell root{0, di.box_width(), 0, di.box_height(), false, false, {}};
  for (const KShape& k : di.instance.shapes) {
    Rect b = bounding_rect(k);
    if (b.xl < root.x1 || b.xr > root.x2 || b.yb < root.y1 || b.yt > root.y2) {
      throw StabError("dp_solve: shape outside the root cell");
    }
  }
  detail::DpSolver solver(di, params);
  try {
    auto v = solver.solve(root);
    out.dp_value = v.cost;
    std::set<HSegment> unique(v.segments.begin(), v.segments.end());
    out.solution = Solution::from_segments({unique.begin(), unique.end()});
  } catch (const detail::DpSolver::BudgetExceeded&) {
    out.status = SolveStatus::kBudgetExceeded;
    out.solution = greedy_stab(di.instance);
    out.dp_value = out.solution.cost;
  }
  out.stats = solver.stats();
  if (!verify_solution(di.instance, out.solution).feasible) {
    throw StabError("dp_solve: internal error, output is infeasible");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operation-sequence audit

// Reference pieces no longer than alpha / eps (rectangles stabbed by a long
// segment are grouped left to right) and aligned to their level grid.
inline Solution aligned_reference(const Solution& sol, const Instance& inst,
                                  const PtasParams& p) {
  const Coord limit = p.alpha / p.eps;
  Solution out;
  for (const HSegment& seg : sol.segments) {
    std::vector<HSegment> pieces;
    if (seg.length() <= limit) {
      pieces.push_back(seg);
    } else {
      std::vector<Rect> rects;
      for (const KShape& k : inst.shapes) {
        for (const Rect& r : k.rects) {
          if (stabs_rect(seg, r)) rects.push_back(r);
        }
      }
      std::sort(rects.begin(), rects.end(),
                [](const Rect& a, const Rect& b) { return a.xl < b.xl; });
      for (const Rect& r : rects) {
        if (!pieces.empty() && std::max<Coord>(pieces.back().xr, r.xr) - pieces.back().xl <= limit) {
          pieces.back().xr = std::max<Coord>(pieces.back().xr, r.xr);
        } else {
          pieces.push_back(HSegment{r.xl, r.xr, seg.y});
        }
      }
    }
    for (const HSegment& piece : pieces) out.add(align_to_fixpoint(piece, p));
  }
  return out;
}

struct AuditOptions {
  std::set<int> skip_line_levels;  // corrupts the schedule for negative tests
};

struct AuditReport {
  std::vector<std::string> violations;
  std::size_t max_live = 0;
  std::size_t cells = 0;
  int levels = 0;

  bool ok() const { return violations.empty(); }
};

namespace detail {

struct AuditCell {
  DpCell cell;
  std::map<HSegment, int> level;  // level of the reference segment a live part came from
};

inline std::string describe(const DpCell& c) {
  return "[" + format_coord(c.x1) + "," + format_coord(c.x2) + "]x[" +
         format_coord(c.y1) + "," + format_coord(c.y2) + "]";
}

}  // namespace detail

// Replays the level schedule on a well-aligned reference: for each level j,
// line operations on level-j grid lines, trivial operations, strip-dividing
// adds every eps^-3 level-j segments, then adds of the level-j segments.
// Checks discreteness, |live| <= 3 eps^-3, and that no segment of level
// <= j - 3 is still live when level j segments are added.
inline AuditReport op_sequence_audit(const DiscreteInstance& di, const PtasParams& p,
                                     const Solution& reference,
                                     const AuditOptions& options = {}) {
  using detail::AuditCell;
  using detail::DpCell;
  AuditReport report;
  const Instance& inst = di.instance;
  if (!verify_solution(inst, reference).feasible) {
    report.violations.push_back("reference is not feasible");
    return report;
  }
  std::vector<std::pair<HSegment, int>> ref;
  for (const HSegment& s : reference.segments) {
    if (!is_well_aligned(s, p)) {
      report.violations.push_back("reference segment [" + format_coord(s.xl) + "," +
                                  format_coord(s.xr) + "]@" + format_coord(s.y) +
                                  " is not well-aligned");
      continue;
    }
    ref.emplace_back(s, *level_of(s.length(), p));
  }
  if (!report.ok()) return report;

  const Coord g = rational_pow(p.eps, static_cast<unsigned>(p.d));
  const std::size_t per_level =
      static_cast<std::size_t>(floor_int(eps_pow(p.eps, -3)).get_ui());

  auto level_of_live = [](const AuditCell& a, const HSegment& s) {
    // live parts are clipped; find the originating segment by containment
    for (const auto& [orig, lvl] : a.level) {
      if (orig.y == s.y && orig.xl <= s.xl && s.xr <= orig.xr) return lvl;
    }
    return -1;
  };
  auto trivial_closure = [&](std::vector<AuditCell> cells) {
    std::vector<AuditCell> done;
    while (!cells.empty()) {
      AuditCell a = std::move(cells.back());
      cells.pop_back();
      if (auto t = detail::spanning_live(a.cell)) {
        auto [lo, hi] = detail::split_horizontal(a.cell, a.cell.live[*t].y);
        cells.push_back(AuditCell{lo, a.level});
        cells.push_back(AuditCell{hi, a.level});
      } else {
        done.push_back(std::move(a));
      }
    }
    return done;
  };

  std::vector<AuditCell> cells{
      AuditCell{DpCell{0, di.box_width(), 0, di.box_height(), false, false, {}}, {}}};
  for (int j = 0; j < p.d; ++j) {
    ++report.levels;
    // line operations of level j
    if (!options.skip_line_levels.count(j)) {
      std::vector<AuditCell> next;
      const Coord s = p.spacing(j);
      for (AuditCell& a : cells) {
        std::vector<AuditCell> parts{a};
        for (Coord x = p.offset + ceil_to_grid(a.cell.x1 - p.offset, s); x < a.cell.x2;
             x += s) {
          if (x <= a.cell.x1) continue;
          AuditCell last = parts.back();
          parts.pop_back();
          auto [l, r] = detail::split_vertical(last.cell, x);
          parts.push_back(AuditCell{l, last.level});
          parts.push_back(AuditCell{r, last.level});
        }
        next.insert(next.end(), parts.begin(), parts.end());
      }
      cells = std::move(next);
    }
    cells = trivial_closure(std::move(cells));

    for (const AuditCell& a : cells) {
      for (const HSegment& s : a.cell.live) {
        int lvl = level_of_live(a, s);
        if (lvl >= 0 && lvl <= j - 3) {
          report.violations.push_back("level " + std::to_string(j) + ", cell " +
                                      detail::describe(a.cell) + ": stale level-" +
                                      std::to_string(lvl) + " segment");
        }
      }
    }

    auto level_parts = [&](const AuditCell& a) {
      std::vector<HSegment> parts;
      for (const auto& [s, lvl] : ref) {
        if (lvl != j || s.y < a.cell.y1 || s.y > a.cell.y2) continue;
        HSegment t{std::max<Coord>(s.xl, a.cell.x1), std::min<Coord>(s.xr, a.cell.x2), s.y};
        if (t.xl < t.xr) parts.push_back(t);
      }
      std::sort(parts.begin(), parts.end());
      return parts;
    };

    // strip-dividing adds, each followed by its trivial operation
    std::vector<AuditCell> divided;
    for (AuditCell& a : cells) {
      std::vector<HSegment> parts = level_parts(a);
      std::vector<AuditCell> pieces{a};
      for (std::size_t idx = per_level - 1; idx < parts.size(); idx += per_level) {
        const Coord y = parts[idx].y;
        AuditCell top = pieces.back();
        if (!(top.cell.y1 < y && y < top.cell.y2)) continue;
        pieces.pop_back();
        auto [lo, hi] = detail::split_horizontal(top.cell, y);
        // the strip-wide segment becomes the shared edge flag
        lo.top = true;
        hi.bottom = true;
        detail::normalize(lo);
        detail::normalize(hi);
        pieces.push_back(AuditCell{lo, top.level});
        pieces.push_back(AuditCell{hi, top.level});
      }
      divided.insert(divided.end(), pieces.begin(), pieces.end());
    }
    cells = std::move(divided);

    // adds of the level-j reference segments
    for (AuditCell& a : cells) {
      for (const auto& [s, lvl] : ref) {
        if (lvl == j) a.level.emplace(s, lvl);
      }
      for (const HSegment& part : level_parts(a)) a.cell.live.push_back(part);
      detail::normalize(a.cell);
      report.max_live = std::max(report.max_live, a.cell.live.size());
      if (a.cell.live.size() > p.live_cap()) {
        report.violations.push_back("level " + std::to_string(j) + ", cell " +
                                    detail::describe(a.cell) + ": " +
                                    std::to_string(a.cell.live.size()) +
                                    " live segments exceed 3 eps^-3");
      }
      const DpCell& c = a.cell;
      bool discrete = is_multiple_of(c.x1, g) && is_multiple_of(c.x2, g) &&
                      floor_int(c.y1) == c.y1 && floor_int(c.y2) == c.y2;
      for (const HSegment& s : c.live) {
        discrete = discrete && is_multiple_of(s.xl, g) && is_multiple_of(s.xr, g) &&
                   floor_int(s.y) == s.y;
      }
      if (!discrete) {
        report.violations.push_back("level " + std::to_string(j) + ", cell " +
                                    detail::describe(c) + ": not discrete");
      }
    }
    cells = trivial_closure(std::move(cells));
  }
  report.cells = cells.size();
  return report;
}

// ---------------------------------------------------------------------------
// End-to-end solver

struct PtasOptions {
  Coord eps{1, 4};
  Coord alpha = 1;
  std::size_t add_cap = 2;
  int line_level_cap = 2;
  bool offset_sweep = false;
  RectStabber stabber = RectStabber::kExact;
  std::optional<std::uint64_t> cell_budget;
};

struct PtasSolveResult {
  Solution solution;  // input coordinates
  DpResult dp;
  bool lifted = false;  // input was already discrete; no scaling applied
  Coord offset = 0;
  std::size_t offsets_tried = 0;
};

// Runs the DP on the input if it is already discrete for the parameters,
// otherwise on its discretization, and maps the result back. With
// offset_sweep every discrete offset in [0, alpha eps^-2] is tried and the
// cheapest mapped-back solution kept (smallest offset on ties).
inline PtasSolveResult ptas_solve(const Instance& inst, const PtasOptions& o) {
  PtasSolveResult out;
  if (inst.shapes.empty()) return out;
  PtasParams p = make_params(o.eps, inst.shapes.size(), o.alpha, o.add_cap);
  p.line_level_cap = o.line_level_cap;
  p.stabber = o.stabber;
  p.cell_budget = o.cell_budget;

  std::optional<DiscreteInstance> di;
  try {
    di = lift_discrete(inst, p);
    if (!check_discrete(*di).ok()) di.reset();
  } catch (const StabError&) {
    di.reset();
  }
  out.lifted = di.has_value();
  if (!di) di = discretize(inst, o.eps, o.alpha);

  std::vector<Coord> offsets{0};
  if (o.offset_sweep) {
    offsets.clear();
    const Coord g = p.grid(), top = p.alpha * eps_pow(p.eps, -2);
    for (Coord r = 0; r <= top; r += g) offsets.push_back(r);
  }
  bool have = false;
  for (const Coord& r : offsets) {
    p.offset = r;
    PtasSolveResult cur;
    cur.offset = r;
    if (!di->instance.shapes.empty()) cur.dp = dp_solve(*di, p);
    cur.solution = map_back(*di, cur.dp.solution);
    if (!have || cur.solution.cost < out.solution.cost) {
      out.solution = std::move(cur.solution);
      out.dp = std::move(cur.dp);
      out.offset = r;
      have = true;
    }
  }
  out.offsets_tried = offsets.size();
  if (!verify_solution(inst, out.solution).feasible) {
    throw StabError("ptas_solve: internal error, mapped solution is infeasible");
  }
  return out;
}

}  // namespace stabkit

#endif  // STABKIT_PTAS_DP_HPP_
