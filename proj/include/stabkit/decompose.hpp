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

// Structural transformations used by the approximation schemes: width
// normalization, partition into vertical strips of bounded width, and
// balanced horizontal cuts of a strip against a reference solution.

#ifndef STABKIT_DECOMPOSE_HPP_
#define STABKIT_DECOMPOSE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stabkit/cover.hpp"
#include "stabkit/geometry.hpp"

namespace stabkit {

inline Instance sub_instance(const Instance& inst,
                             const std::vector<std::size_t>& indices) {
  Instance out;
  out.k = inst.k;
  for (std::size_t i : indices) out.shapes.push_back(inst.shapes.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// y-compression

// Maps the distinct horizontal boundaries of an instance to 0, 1, 2, ...
// Stabbing is invariant under this map for segments placed on boundaries.
struct YCompression {
  Instance instance;
  std::vector<Coord> levels;  // levels[i] is the original y of compressed i

  Coord original_y(const Coord& y) const {
    mpz_class i = floor_int(y);
    if (i != y || i < 0 || i >= static_cast<long>(levels.size())) {
      throw StabError("YCompression: y = " + format_coord(y) +
                      " is not a compressed level");
    }
    return levels[static_cast<std::size_t>(i.get_si())];
  }
};

inline YCompression compress_y(const Instance& inst) {
  YCompression out;
  std::vector<Coord> ys;
  for (const KShape& s : inst.shapes) {
    for (const Rect& r : s.rects) {
      ys.push_back(r.yb);
      ys.push_back(r.yt);
    }
  }
  out.levels = detail::sorted_unique(std::move(ys));
  auto rank = [&](const Coord& y) {
    return Coord(static_cast<long>(detail::rank_of(out.levels, y)));
  };
  out.instance.k = inst.k;
  for (const KShape& s : inst.shapes) {
    KShape c = s;
    for (Rect& r : c.rects) {
      r.yb = rank(r.yb);
      r.yt = rank(r.yt);
    }
    out.instance.shapes.push_back(std::move(c));
  }
  return out;
}

// Moves a segment of the compressed instance back to original heights.
// Any y in [i, i+1] maps into [levels[i], levels[i+1]] by snapping to the
// lower level; that keeps every stabbed rectangle stabbed.
inline HSegment uncompress_segment(const YCompression& yc, const HSegment& s) {
  mpz_class i = floor_int(s.y);
  if (i < 0) i = 0;
  if (i >= static_cast<long>(yc.levels.size())) {
    i = static_cast<long>(yc.levels.size()) - 1;
  }
  return HSegment{s.xl, s.xr, yc.levels[static_cast<std::size_t>(i.get_si())]};
}

// ---------------------------------------------------------------------------
// Width normalization

struct PreprocessOptions {
  // Cost of a known feasible solution; greedy_stab is run when absent.
  std::optional<Coord> gamma;
};

struct ScaledInstance {
  Instance instance;         // residual shapes, x scaled by beta
  Coord beta;                // x scale factor
  Coord epsilon;
  Coord log_bound;           // L: upper bound on rectangle widths after scaling
  Coord gamma;               // cost of the solution used to pick beta
  std::vector<HSegment> pre_stabbed;            // original coordinates
  std::vector<std::size_t> original_index;      // residual shape -> input shape
  std::size_t discarded_parts = 0;
};

// Scales x so that the optimum lies in [1, L] with L = H_n (the harmonic
// number, the greedy guarantee), stabs every shape with w_min <= eps / n by
// its narrowest rectangle, and drops rectangles wider than L from the rest.
// Shapes whose wide middle rectangle is dropped keep their remaining
// rectangles; stabbing semantics only depend on the rectangles.
inline ScaledInstance preprocess(const Instance& inst, const Coord& eps,
                                 const PreprocessOptions& options = {}) {
  if (inst.shapes.empty()) throw StabError("preprocess: empty instance");
  if (sgn(eps) <= 0 || eps >= Coord(1, 3)) {
    throw StabError("preprocess: epsilon must lie in (0, 1/3)");
  }
  const std::size_t n = inst.shapes.size();
  ScaledInstance out;
  out.epsilon = eps;
  out.log_bound = harmonic(n);
  out.gamma = options.gamma ? *options.gamma : greedy_stab(inst).cost;
  if (sgn(out.gamma) <= 0) throw StabError("preprocess: gamma must be positive");
  out.beta = out.log_bound / out.gamma;
  out.instance.k = inst.k;
  const Coord narrow = eps / Coord(static_cast<long>(n));

  for (std::size_t i = 0; i < n; ++i) {
    KShape scaled = scale_x(inst.shapes[i], out.beta);
    if (scaled.w_min() <= narrow) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < scaled.rects.size(); ++j) {
        if (scaled.rects[j].width() < scaled.rects[best].width()) best = j;
      }
      const Rect& r = inst.shapes[i].rects[best];
      out.pre_stabbed.push_back(HSegment{r.xl, r.xr, r.yb});
      continue;
    }
    KShape kept;
    for (const Rect& r : scaled.rects) {
      if (r.width() > out.log_bound) {
        ++out.discarded_parts;
      } else {
        kept.rects.push_back(r);
      }
    }
    if (kept.rects.empty()) {
      throw StabError("preprocess: shape " + std::to_string(i) +
                      " has no rectangle of width <= L; gamma is below the optimum");
    }
    out.instance.shapes.push_back(std::move(kept));
    out.original_index.push_back(i);
  }
  return out;
}

inline ValidationReport check_scaled(const ScaledInstance& s) {
  ValidationReport report;
  const Coord narrow =
      s.epsilon / Coord(static_cast<long>(s.original_index.size() +
                                          s.pre_stabbed.size()));
  for (std::size_t i = 0; i < s.instance.shapes.size(); ++i) {
    const KShape& k = s.instance.shapes[i];
    if (k.w_min() <= narrow) {
      report.violations.push_back("shape " + std::to_string(i) + ": w_min <= eps/n");
    }
    if (k.w_max() > s.log_bound) {
      report.violations.push_back("shape " + std::to_string(i) + ": w_max > L");
    }
  }
  return report;
}

// Maps a solution of the scaled residual instance back to the input
// coordinates and appends the pre-stabbed segments.
inline Solution unscale(const ScaledInstance& s, const Solution& scaled) {
  Solution out;
  for (const HSegment& seg : scaled.segments) {
    out.add(HSegment{seg.xl / s.beta, seg.xr / s.beta, seg.y});
  }
  for (const HSegment& seg : s.pre_stabbed) out.add(seg);
  return out;
}

// ---------------------------------------------------------------------------
// Strip partition

struct Strip {
  long index = 0;  // t: the strip is [z + t * spacing, z + (t + 1) * spacing]
  Coord xl, xr;
  std::vector<std::size_t> shapes;
};

struct StripPartition {
  Coord mu, z, spacing;
  std::vector<Strip> strips;         // ordered by index, nonempty only
  std::vector<std::size_t> rest;     // shapes crossed by a grid line
};

inline Coord max_width(const Instance& inst) { return width_stats(inst).w_max; }

inline void require_strip_preconditions(const Instance& inst, const Coord& mu) {
  if (sgn(mu) <= 0) throw StabError("strip_partition: mu must be positive");
  if (inst.shapes.empty()) throw StabError("strip_partition: empty instance");
  if (mu / Coord(static_cast<long>(inst.shapes.size())) >= width_stats(inst).w_min) {
    throw StabError("strip_partition: requires mu / n < w_min");
  }
}

// Vertical lines at x = z + i * w_max / mu. Strips are closed, so a shape
// that only touches a line with its boundary still lies inside a strip; a
// shape goes to the rest set when a line passes through its interior.
inline StripPartition strip_partition(const Instance& inst, const Coord& mu,
                                      const Coord& z) {
  require_strip_preconditions(inst, mu);
  StripPartition out;
  out.mu = mu;
  out.z = z;
  out.spacing = max_width(inst) / mu;
  std::map<long, std::vector<std::size_t>> by_strip;
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    auto [lo, hi] = x_extent(inst.shapes[i]);
    long t = floor_int((lo - z) / out.spacing).get_si();
    if (z + Coord(t + 1) * out.spacing < hi) {
      out.rest.push_back(i);
    } else {
      by_strip[t].push_back(i);
    }
  }
  for (auto& [t, shapes] : by_strip) {
    Coord left = z + Coord(t) * out.spacing;
    out.strips.push_back(Strip{t, left, left + out.spacing, std::move(shapes)});
  }
  return out;
}

inline ValidationReport check_partition(const Instance& inst,
                                        const StripPartition& p) {
  ValidationReport report;
  std::vector<int> seen(inst.shapes.size(), 0);
  for (const Strip& s : p.strips) {
    if (s.xr - s.xl > max_width(inst) / p.mu) {
      report.violations.push_back("strip " + std::to_string(s.index) + " too wide");
    }
    for (std::size_t i : s.shapes) {
      ++seen.at(i);
      auto [lo, hi] = x_extent(inst.shapes[i]);
      if (lo < s.xl || hi > s.xr) {
        report.violations.push_back("shape " + std::to_string(i) +
                                    " leaves strip " + std::to_string(s.index));
      }
    }
  }
  for (std::size_t i : p.rest) {
    ++seen.at(i);
    auto [lo, hi] = x_extent(inst.shapes[i]);
    Coord line = p.z + Coord(floor_int((lo - p.z) / p.spacing) + 1) * p.spacing;
    if (line >= hi) {
      report.violations.push_back("rest shape " + std::to_string(i) +
                                  " crosses no grid line");
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) {
      report.violations.push_back("shape " + std::to_string(i) + " assigned " +
                                  std::to_string(seen[i]) + " times");
    }
  }
  return report;
}

// Z = { i * mu / n : 0 <= i * mu / n < w_max / mu }.
inline std::vector<Coord> offset_grid(const Instance& inst, const Coord& mu) {
  require_strip_preconditions(inst, mu);
  const Coord step = mu / Coord(static_cast<long>(inst.shapes.size()));
  const Coord limit = max_width(inst) / mu;
  if (limit <= step) throw StabError("best_offset: offset grid is empty");
  std::vector<Coord> out;
  for (Coord z = 0; z < limit; z += step) out.push_back(z);
  return out;
}

enum class RestCost { kGreedy, kExact };

struct OffsetSearch {
  Coord z;
  StripPartition partition;
  Coord rest_cost;         // cost of stabbing the rest set at z
  std::size_t offsets = 0; // |Z|
};

// Evaluates every offset in Z and returns the one whose rest set is
// cheapest to stab (smallest z on ties). Rest sets repeat across offsets,
// so costs are cached per subset.
inline OffsetSearch best_offset(const Instance& inst, const Coord& mu,
                                RestCost mode = RestCost::kGreedy) {
  std::vector<Coord> grid = offset_grid(inst, mu);
  std::map<std::vector<std::size_t>, Coord> cache;
  auto cost_of = [&](const std::vector<std::size_t>& rest) -> Coord {
    if (rest.empty()) return 0;
    auto it = cache.find(rest);
    if (it != cache.end()) return it->second;
    Instance sub = sub_instance(inst, rest);
    Coord c = mode == RestCost::kGreedy ? greedy_stab(sub).cost
                                        : exact_solve(sub).solution.cost;
    cache.emplace(rest, c);
    return c;
  };
  std::optional<OffsetSearch> best;
  for (const Coord& z : grid) {
    StripPartition p = strip_partition(inst, mu, z);
    Coord c = cost_of(p.rest);
    if (!best || c < best->rest_cost) best = OffsetSearch{z, std::move(p), c, 0};
  }
  best->offsets = grid.size();
  return *best;
}

// ---------------------------------------------------------------------------
// Balanced horizontal cuts

// Clips reference segments to [a, b] and merges overlapping segments at the
// same height. Clipping keeps every shape inside the strip stabbed; after
// merging, the segments at one height cost at most b - a in total.
inline std::vector<HSegment> normalize_reference(const std::vector<HSegment>& ref,
                                                 const Coord& a, const Coord& b) {
  std::vector<HSegment> clipped;
  for (const HSegment& s : ref) {
    if (s.xr < a || s.xl > b) continue;
    clipped.push_back(HSegment{std::max<Coord>(s.xl, a), std::min<Coord>(s.xr, b), s.y});
  }
  std::sort(clipped.begin(), clipped.end());
  std::vector<HSegment> out;
  for (const HSegment& s : clipped) {
    if (!out.empty() && out.back().y == s.y && s.xl <= out.back().xr) {
      out.back().xr = std::max<Coord>(out.back().xr, s.xr);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

enum class CutStatus { kCut, kNoCutNeeded };

inline const char* to_string(CutStatus s) {
  return s == CutStatus::kCut ? "cut" : "no_cut_needed";
}

struct CutResult {
  CutStatus status = CutStatus::kNoCutNeeded;
  Coord h;
  HSegment cut_segment;
  std::vector<std::size_t> below, above, straddlers;
  Coord total;        // normalized reference cost
  Coord below_cost;   // reference cost at heights <= h
  Coord above_cost;   // reference cost at heights > h
  std::vector<HSegment> reference;  // normalized reference
};

namespace detail {

inline void require_inside_strip(const Instance& strip, const Coord& a,
                                 const Coord& b) {
  if (a > b) throw StabError("balanced_cut: strip interval is reversed");
  for (std::size_t i = 0; i < strip.shapes.size(); ++i) {
    auto [lo, hi] = x_extent(strip.shapes[i]);
    if (lo < a || hi > b) {
      throw StabError("balanced_cut: shape " + std::to_string(i) +
                      " is not inside the strip");
    }
  }
}

inline Coord total_length(const std::vector<HSegment>& segs) {
  Coord c = 0;
  for (const HSegment& s : segs) c += s.length();
  return c;
}

// Core cut on a subset of shapes with a normalized, y-sorted reference.
inline CutResult cut_subset(const Instance& strip, const std::vector<std::size_t>& shapes,
                            const Coord& a, const Coord& b,
                            std::vector<HSegment> ref, const Coord& threshold) {
  CutResult out;
  out.total = total_length(ref);
  out.reference = ref;
  if (out.total <= threshold) return out;
  out.status = CutStatus::kCut;
  const Coord half = out.total / 2;
  Coord cum = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    cum += ref[i].length();
    bool level_done = i + 1 == ref.size() || ref[i + 1].y != ref[i].y;
    if (level_done && cum >= half) {
      out.h = ref[i].y;
      break;
    }
  }
  out.cut_segment = HSegment{a, b, out.h};
  out.below_cost = 0;
  for (const HSegment& s : ref) {
    if (s.y <= out.h) out.below_cost += s.length();
  }
  out.above_cost = out.total - out.below_cost;
  for (std::size_t i : shapes) {
    auto [lo, hi] = y_extent(strip.shapes[i]);
    if (hi < out.h) {
      out.below.push_back(i);
    } else if (lo > out.h) {
      out.above.push_back(i);
    } else if (stabs_kshape(out.cut_segment, strip.shapes[i])) {
      out.straddlers.push_back(i);
    } else {
      throw StabError("balanced_cut: shape " + std::to_string(i) +
                      " spans the cut height without being stabbed");
    }
  }
  return out;
}

}  // namespace detail

// Cuts the strip [a, b] x R at the least reference height h where the
// cumulative reference cost reaches half of the total. Reports
// kNoCutNeeded when the total does not exceed the threshold.
inline CutResult balanced_cut(const Instance& strip, const Coord& a, const Coord& b,
                              const Solution& reference, const Coord& threshold) {
  detail::require_inside_strip(strip, a, b);
  if (!verify_solution(strip, reference).feasible) {
    throw StabError("balanced_cut: reference does not stab every strip shape");
  }
  std::vector<std::size_t> all(strip.shapes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return detail::cut_subset(strip, all, a, b,
                            normalize_reference(reference.segments, a, b), threshold);
}

struct CutPiece {
  std::vector<std::size_t> shapes;
  std::vector<HSegment> reference;
  Coord reference_cost;
};

struct RecursiveCuts {
  std::vector<HSegment> cuts;
  Coord cut_cost = 0;
  Coord reference_cost = 0;  // normalized reference cost of the whole strip
  std::vector<CutPiece> pieces;
  std::size_t depth = 0;
};

// Cuts recursively until every piece carries reference cost <= threshold.
// Each side keeps only the reference segments strictly on its side, which
// still stab its shapes and guarantees progress.
inline RecursiveCuts recursive_cuts(const Instance& strip, const Coord& a,
                                    const Coord& b, const Solution& reference,
                                    const Coord& threshold) {
  detail::require_inside_strip(strip, a, b);
  if (!verify_solution(strip, reference).feasible) {
    throw StabError("recursive_cuts: reference does not stab every strip shape");
  }
  RecursiveCuts out;
  std::vector<HSegment> ref = normalize_reference(reference.segments, a, b);
  out.reference_cost = detail::total_length(ref);

  struct Frame {
    std::vector<std::size_t> shapes;
    std::vector<HSegment> ref;
    std::size_t depth;
  };
  std::vector<std::size_t> all(strip.shapes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<Frame> stack{{all, ref, 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    out.depth = std::max(out.depth, f.depth);
    CutResult c = detail::cut_subset(strip, f.shapes, a, b, f.ref, threshold);
    if (c.status == CutStatus::kNoCutNeeded) {
      out.pieces.push_back(CutPiece{f.shapes, f.ref, c.total});
      continue;
    }
    out.cuts.push_back(c.cut_segment);
    out.cut_cost += c.cut_segment.length();
    std::vector<HSegment> lower, upper;
    for (const HSegment& s : f.ref) {
      if (s.y < c.h) lower.push_back(s);
      if (s.y > c.h) upper.push_back(s);
    }
    stack.push_back(Frame{c.above, std::move(upper), f.depth + 1});
    stack.push_back(Frame{c.below, std::move(lower), f.depth + 1});
  }
  return out;
}

}  // namespace stabkit

#endif  // STABKIT_DECOMPOSE_HPP_
