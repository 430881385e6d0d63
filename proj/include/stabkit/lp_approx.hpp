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

// LP relaxation of stabbing over the candidate set, solved exactly, plus the
// O(k) rounding pipeline: per shape, keep one rectangle carrying at least
// 1/k of the fractional mass and stab the resulting rectangle set.

#ifndef STABKIT_LP_APPROX_HPP_
#define STABKIT_LP_APPROX_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stabkit/cover.hpp"
#include "stabkit/geometry.hpp"

namespace stabkit {

// min sum_s |s| z_s  s.t.  sum_{s stabs K} z_s >= 1 for every shape K, z >= 0.
struct LpModel {
  std::vector<Coord> costs;             // one per variable (candidate)
  std::vector<std::vector<int>> rows;   // per shape, the stabbing variables

  std::size_t num_vars() const { return costs.size(); }
  std::size_t num_constraints() const { return rows.size(); }
};

struct FracSolution {
  std::vector<Coord> values;
  Coord objective = 0;
  std::vector<Coord> duals;  // one per shape, an optimal packing
  std::size_t pivots = 0;
};

inline LpModel build_lp(const Instance& inst, const CandidateSet& cands) {
  LpModel model;
  model.rows.resize(inst.shapes.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    model.costs.push_back(cands.segments[c].length());
    for (int s : cands.stab_sets[c]) {
      model.rows[static_cast<std::size_t>(s)].push_back(static_cast<int>(c));
    }
  }
  for (std::size_t s = 0; s < model.rows.size(); ++s) {
    if (model.rows[s].empty()) {
      throw StabError("build_lp: shape " + std::to_string(s) +
                      " has no stabbing candidate");
    }
  }
  return model;
}

// Exact simplex on the packing dual
//   max sum_K y_K  s.t.  sum_{K stabbed by s} y_K <= |s|,  y >= 0,
// which starts feasible at y = 0. Bland's rule on entering and leaving
// variables. The covering solution z is read off the slack reduced costs,
// then checked for feasibility and strong duality before returning.
inline FracSolution solve_lp(const LpModel& model) {
  const std::size_t n = model.num_constraints();  // dual structurals
  const std::size_t m = model.num_vars();         // dual rows
  const std::size_t cols = n + m;
  FracSolution out;
  if (n == 0) {
    out.values.assign(m, 0);
    return out;
  }

  std::vector<std::vector<Coord>> tab(m, std::vector<Coord>(cols + 1, 0));
  for (std::size_t k = 0; k < n; ++k) {
    for (int c : model.rows[k]) tab[static_cast<std::size_t>(c)][k] = 1;
  }
  for (std::size_t r = 0; r < m; ++r) {
    tab[r][n + r] = 1;
    tab[r][cols] = model.costs[r];
  }
  std::vector<Coord> obj(cols + 1, 0);
  for (std::size_t k = 0; k < n; ++k) obj[k] = -1;
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  for (;;) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < cols; ++j) {
      if (sgn(obj[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (!enter) break;
    std::optional<std::size_t> leave;
    Coord best_ratio;
    for (std::size_t r = 0; r < m; ++r) {
      if (sgn(tab[r][*enter]) <= 0) continue;
      Coord ratio = tab[r][cols] / tab[r][*enter];
      if (!leave || ratio < best_ratio ||
          (ratio == best_ratio && basis[r] < basis[*leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (!leave) throw StabError("solve_lp: covering LP is infeasible");

    std::vector<Coord>& prow = tab[*leave];
    Coord pivot = prow[*enter];
    for (Coord& v : prow) v /= pivot;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == *leave || sgn(tab[r][*enter]) == 0) continue;
      Coord f = tab[r][*enter];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (sgn(prow[j]) != 0) tab[r][j] -= f * prow[j];
      }
    }
    if (sgn(obj[*enter]) != 0) {
      Coord f = obj[*enter];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (sgn(prow[j]) != 0) obj[j] -= f * prow[j];
      }
    }
    basis[*leave] = *enter;
    ++out.pivots;
  }

  out.objective = obj[cols];
  out.values.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.values[r] = obj[n + r];
  out.duals.assign(n, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) out.duals[basis[r]] = tab[r][cols];
  }

  Coord primal = 0;
  for (std::size_t c = 0; c < m; ++c) {
    if (sgn(out.values[c]) < 0) throw StabError("solve_lp: negative primal value");
    primal += model.costs[c] * out.values[c];
  }
  for (std::size_t k = 0; k < n; ++k) {
    Coord lhs = 0;
    for (int c : model.rows[k]) lhs += out.values[static_cast<std::size_t>(c)];
    if (lhs < 1) throw StabError("solve_lp: recovered primal violates a cover row");
  }
  if (primal != out.objective) {
    throw StabError("solve_lp: primal and dual objectives differ");
  }
  return out;
}

struct SelectedRect {
  std::size_t shape = 0;
  std::size_t rect_index = 0;
  Rect rect;
  Coord mass;  // sum of z*_s over segments stabbing this rectangle
};

// For every shape keep one rectangle whose stabbing mass under z* is at
// least 1/k; among those the narrowest (lowest index on ties). Depends on z*
// only, so scaling z* by k leaves the selection unchanged.
inline std::vector<SelectedRect> scale_extract(const Instance& inst,
                                               const CandidateSet& cands,
                                               const FracSolution& frac, int k) {
  if (k < 1) throw StabError("scale_extract: k must be positive");
  const Coord threshold(1, static_cast<unsigned long>(k));
  std::vector<SelectedRect> out;
  for (std::size_t s = 0; s < inst.shapes.size(); ++s) {
    const KShape& shape = inst.shapes[s];
    std::optional<SelectedRect> pick;
    for (std::size_t i = 0; i < shape.rects.size(); ++i) {
      const Rect& r = shape.rects[i];
      Coord mass = 0;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        if (sgn(frac.values[c]) != 0 && stabs_rect(cands.segments[c], r)) {
          mass += frac.values[c];
        }
      }
      if (mass < threshold) continue;
      if (!pick || r.width() < pick->rect.width()) {
        pick = SelectedRect{s, i, r, mass};
      }
    }
    if (!pick) {
      throw StabError("scale_extract: shape " + std::to_string(s) +
                      " has no rectangle with mass >= 1/k");
    }
    out.push_back(*pick);
  }
  return out;
}

enum class RectStabber { kExact, kGreedy };

inline const char* to_string(RectStabber s) {
  return s == RectStabber::kExact ? "exact" : "greedy";
}

struct RectStabResult {
  Solution solution;
  SolveStatus status = SolveStatus::kOptimal;
};

inline Instance rectangles_as_instance(const std::vector<Rect>& rects) {
  Instance inst;
  inst.k = 1;
  for (const Rect& r : rects) inst.shapes.push_back(KShape{{r}});
  return inst;
}

inline RectStabResult rect_stab(const std::vector<Rect>& rects, RectStabber stabber,
                                const ExactOptions& options = {}) {
  RectStabResult out;
  if (rects.empty()) return out;
  Instance inst = rectangles_as_instance(rects);
  if (stabber == RectStabber::kGreedy) {
    out.solution = greedy_stab(inst);
  } else {
    ExactResult r = exact_solve(inst, options);
    out.solution = std::move(r.solution);
    out.status = r.status;
  }
  return out;
}

struct OkResult {
  Solution solution;
  Coord lp_objective = 0;
  Coord ratio = 0;  // cost / LP objective; 0 when the LP value is 0
  std::vector<SelectedRect> selected;
  SolveStatus status = SolveStatus::kOptimal;
};

// LP -> per-shape rectangle selection -> rectangle stabbing. The output stabs
// every selected rectangle and therefore every shape.
inline OkResult ok_pipeline(const Instance& inst, RectStabber stabber,
                            const ExactOptions& options = {}) {
  OkResult out;
  if (inst.shapes.empty()) return out;
  CandidateSet cands = candidate_segments(inst);
  FracSolution frac = solve_lp(build_lp(inst, cands));
  out.lp_objective = frac.objective;
  out.selected = scale_extract(inst, cands, frac, inst.k);
  std::vector<Rect> rects;
  for (const auto& sel : out.selected) rects.push_back(sel.rect);
  RectStabResult rs = rect_stab(rects, stabber, options);
  out.solution = std::move(rs.solution);
  out.status = rs.status;
  if (sgn(out.lp_objective) > 0) out.ratio = out.solution.cost / out.lp_objective;
  return out;
}

struct BoxReduction {
  Instance boxes;  // one rectangle per shape, k = 1
  Coord delta;     // min over shapes of w_min(K) / w_max(K)
};

inline BoxReduction bounding_box_reduce(const Instance& inst) {
  BoxReduction out;
  out.boxes.k = 1;
  out.delta = 1;
  for (const KShape& shape : inst.shapes) {
    out.boxes.shapes.push_back(KShape{{bounding_rect(shape)}});
    if (sgn(shape.w_max()) > 0) {
      Coord ratio = shape.w_min() / shape.w_max();
      if (ratio < out.delta) out.delta = ratio;
    }
  }
  return out;
}

// Grows every segment by factor * |s| on each side.
inline Solution extend_segments(const Solution& sol, const Coord& factor) {
  Solution out;
  for (const HSegment& s : sol.segments) {
    Coord grow = factor * s.length();
    out.add(HSegment{s.xl - grow, s.xr + grow, s.y});
  }
  return out;
}

}  // namespace stabkit

#endif  // STABKIT_LP_APPROX_HPP_
