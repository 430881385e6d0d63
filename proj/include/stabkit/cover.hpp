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

// Stabbing as weighted set cover: a finite redundancy-free candidate set of
// segments, the weight-per-new-element greedy, and an exact branch-and-bound
// solver used as the reference oracle.

#ifndef STABKIT_COVER_HPP_
#define STABKIT_COVER_HPP_

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "stabkit/geometry.hpp"

namespace stabkit {

// Fixed-size bit set over shape indices.
class ShapeMask {
 public:
  ShapeMask() = default;
  explicit ShapeMask(std::size_t size)
      : size_(size), words_((size + 63) / 64, 0) {}

  static ShapeMask full(std::size_t size) {
    ShapeMask m(size);
    for (std::size_t i = 0; i < size; ++i) m.set(i);
    return m;
  }

  std::size_t size() const { return size_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & std::uint64_t{1};
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(),
                       [](std::uint64_t w) { return w == 0; });
  }
  bool intersects(const ShapeMask& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }
  std::size_t count_and(const ShapeMask& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    }
    return c;
  }
  ShapeMask& operator|=(const ShapeMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  ShapeMask& operator&=(const ShapeMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  ShapeMask without(const ShapeMask& o) const {
    ShapeMask out = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= ~o.words_[i];
    return out;
  }
  std::optional<std::size_t> first() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) {
        return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
      }
    }
    return std::nullopt;
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) out.push_back(static_cast<int>(i));
    }
    return out;
  }
  std::size_t hash() const {
    std::size_t h = size_;
    for (auto w : words_) hash_combine(h, std::hash<std::uint64_t>{}(w));
    return h;
  }

  friend bool operator==(const ShapeMask&, const ShapeMask&) = default;
  friend bool operator<(const ShapeMask& a, const ShapeMask& b) {
    return a.members() < b.members();
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ShapeMaskHash {
  std::size_t operator()(const ShapeMask& m) const { return m.hash(); }
};

// Redundancy-free candidate segments: no empty stab set, no two segments
// with the same stab set (the shortest one is kept).
struct CandidateSet {
  std::vector<HSegment> segments;
  std::vector<std::vector<int>> stab_sets;
  std::vector<ShapeMask> masks;

  std::size_t size() const { return segments.size(); }
};

namespace detail {

inline std::vector<Coord> sorted_unique(std::vector<Coord> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

inline std::size_t rank_of(const std::vector<Coord>& sorted, const Coord& v) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

struct RankedRect {
  std::size_t shape;
  std::size_t xl, xr, yb, yt;
};

}  // namespace detail

// Every segment whose endpoints lie on vertical rect boundaries and whose
// height lies on a horizontal rect boundary, deduplicated by stab set.
inline CandidateSet candidate_segments(const Instance& inst) {
  const std::size_t n = inst.shapes.size();
  std::vector<Coord> xs_raw, ys_raw;
  for (const KShape& shape : inst.shapes) {
    for (const Rect& r : shape.rects) {
      xs_raw.push_back(r.xl);
      xs_raw.push_back(r.xr);
      ys_raw.push_back(r.yb);
      ys_raw.push_back(r.yt);
    }
  }
  std::vector<Coord> xs = detail::sorted_unique(std::move(xs_raw));
  std::vector<Coord> ys = detail::sorted_unique(std::move(ys_raw));

  std::vector<detail::RankedRect> rects;
  for (std::size_t s = 0; s < n; ++s) {
    for (const Rect& r : inst.shapes[s].rects) {
      rects.push_back({s, detail::rank_of(xs, r.xl), detail::rank_of(xs, r.xr),
                       detail::rank_of(ys, r.yb), detail::rank_of(ys, r.yt)});
    }
  }

  struct Best {
    std::size_t a, b, y;
  };
  std::unordered_map<ShapeMask, Best, ShapeMaskHash> best;
  // Compares lengths via ranks; ties broken by (y, xl, xr) rank order.
  auto better = [&](const Best& lhs, const Best& rhs) {
    Coord ll = xs[lhs.b] - xs[lhs.a];
    Coord rl = xs[rhs.b] - xs[rhs.a];
    if (ll != rl) return ll < rl;
    return std::tie(lhs.y, lhs.a, lhs.b) < std::tie(rhs.y, rhs.a, rhs.b);
  };

  for (std::size_t y = 0; y < ys.size(); ++y) {
    std::vector<const detail::RankedRect*> at_y;
    for (const auto& r : rects) {
      if (r.yb <= y && y <= r.yt) at_y.push_back(&r);
    }
    if (at_y.empty()) continue;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (std::size_t b = a; b < xs.size(); ++b) {
        ShapeMask mask(n);
        bool any = false;
        for (const auto* r : at_y) {
          if (a <= r->xl && r->xr <= b) {
            mask.set(r->shape);
            any = true;
          }
        }
        if (!any) continue;
        Best cand{a, b, y};
        auto it = best.find(mask);
        if (it == best.end()) {
          best.emplace(std::move(mask), cand);
        } else if (better(cand, it->second)) {
          it->second = cand;
        }
      }
    }
  }

  std::vector<std::pair<ShapeMask, Best>> entries(best.begin(), best.end());
  std::sort(entries.begin(), entries.end(), [&](const auto& l, const auto& r) {
    if (better(l.second, r.second)) return true;
    if (better(r.second, l.second)) return false;
    return l.first < r.first;
  });
  CandidateSet out;
  for (auto& [mask, b] : entries) {
    out.segments.push_back(HSegment{xs[b.a], xs[b.b], ys[b.y]});
    out.stab_sets.push_back(mask.members());
    out.masks.push_back(std::move(mask));
  }
  return out;
}

// Stab masks of arbitrary segments against an instance.
inline ShapeMask stab_mask(const Instance& inst, const HSegment& s) {
  ShapeMask m(inst.shapes.size());
  for (std::size_t i = 0; i < inst.shapes.size(); ++i) {
    if (stabs_kshape(s, inst.shapes[i])) m.set(i);
  }
  return m;
}

struct CoverSet {
  Coord weight;
  std::vector<int> members;
};

struct CoverInstance {
  int universe = 0;
  std::vector<CoverSet> sets;
};

inline CoverInstance to_setcover(const Instance& inst, const CandidateSet& cands) {
  CoverInstance ci;
  ci.universe = static_cast<int>(inst.shapes.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    ci.sets.push_back({cands.segments[i].length(), cands.stab_sets[i]});
  }
  std::vector<bool> covered(static_cast<std::size_t>(ci.universe), false);
  for (const auto& s : ci.sets) {
    for (int m : s.members) covered[static_cast<std::size_t>(m)] = true;
  }
  for (int e = 0; e < ci.universe; ++e) {
    if (!covered[static_cast<std::size_t>(e)]) {
      throw StabError("to_setcover: shape " + std::to_string(e) +
                      " is stabbed by no candidate");
    }
  }
  return ci;
}

struct GreedyCoverResult {
  std::vector<std::size_t> chosen;
  Coord weight = 0;
};

// Repeatedly picks the set minimizing weight / newly-covered. Ties: smaller
// weight, then lexicographically smaller member list, then lower index.
inline GreedyCoverResult greedy_setcover(const CoverInstance& ci) {
  const std::size_t m = static_cast<std::size_t>(ci.universe);
  std::vector<ShapeMask> masks;
  masks.reserve(ci.sets.size());
  for (const auto& s : ci.sets) {
    ShapeMask mask(m);
    for (int e : s.members) mask.set(static_cast<std::size_t>(e));
    masks.push_back(std::move(mask));
  }
  ShapeMask uncovered = ShapeMask::full(m);
  GreedyCoverResult result;
  while (!uncovered.none()) {
    std::optional<std::size_t> pick;
    std::size_t pick_new = 0;
    for (std::size_t i = 0; i < ci.sets.size(); ++i) {
      std::size_t fresh = masks[i].count_and(uncovered);
      if (fresh == 0) continue;
      if (!pick) {
        pick = i;
        pick_new = fresh;
        continue;
      }
      const Coord& wi = ci.sets[i].weight;
      const Coord& wp = ci.sets[*pick].weight;
      // wi / fresh vs wp / pick_new
      Coord lhs = wi * static_cast<unsigned long>(pick_new);
      Coord rhs = wp * static_cast<unsigned long>(fresh);
      bool take = false;
      if (lhs != rhs) {
        take = lhs < rhs;
      } else if (wi != wp) {
        take = wi < wp;
      } else {
        take = ci.sets[i].members < ci.sets[*pick].members;
      }
      if (take) {
        pick = i;
        pick_new = fresh;
      }
    }
    if (!pick) throw StabError("greedy_setcover: universe is not coverable");
    result.chosen.push_back(*pick);
    result.weight += ci.sets[*pick].weight;
    uncovered = uncovered.without(masks[*pick]);
  }
  return result;
}

inline Solution greedy_stab(const Instance& inst) {
  if (inst.shapes.empty()) return {};
  CandidateSet cands = candidate_segments(inst);
  GreedyCoverResult g = greedy_setcover(to_setcover(inst, cands));
  Solution sol;
  for (std::size_t i : g.chosen) sol.add(cands.segments[i]);
  return sol;
}

enum class SolveStatus { kOptimal, kBudgetExceeded };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::kOptimal ? "optimal" : "budget_exceeded";
}

struct ExactOptions {
  // Maximum number of search nodes; unlimited when empty.
  std::optional<std::uint64_t> node_budget;
  // A certified lower bound on the optimum (e.g. an LP value). The search
  // stops as soon as the incumbent reaches it.
  std::optional<Coord> lower_bound;
};

struct ExactResult {
  Solution solution;
  SolveStatus status = SolveStatus::kOptimal;
  std::uint64_t nodes = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const CandidateSet& cands, std::size_t n,
                 const ExactOptions& options)
      : cands_(cands), n_(n), options_(options), by_shape_(n) {
    for (std::size_t c = 0; c < cands.size(); ++c) {
      weights_.push_back(cands.segments[c].length());
      for (int s : cands.stab_sets[c]) {
        by_shape_[static_cast<std::size_t>(s)].push_back(c);
      }
    }
    for (auto& list : by_shape_) {
      std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        return weights_[a] < weights_[b];
      });
    }
  }

  void seed_incumbent(const std::vector<std::size_t>& chosen, const Coord& cost) {
    best_ = chosen;
    best_cost_ = cost;
    has_best_ = true;
  }

  void run() {
    std::vector<std::size_t> path;
    search(ShapeMask::full(n_), 0, path);
  }

  bool aborted() const { return aborted_; }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::size_t>& best() const { return best_; }
  const Coord& best_cost() const { return best_cost_; }

 private:
  // max(largest cheapest-cover element, sum of fractional shares).
  Coord lower_bound(const ShapeMask& uncovered) const {
    std::vector<std::optional<Coord>> share(n_);
    std::vector<std::optional<Coord>> cheapest(n_);
    for (std::size_t c = 0; c < cands_.size(); ++c) {
      std::size_t fresh = cands_.masks[c].count_and(uncovered);
      if (fresh == 0) continue;
      Coord per = weights_[c] / Coord(static_cast<unsigned long>(fresh));
      for (int s : cands_.stab_sets[c]) {
        auto e = static_cast<std::size_t>(s);
        if (!uncovered.test(e)) continue;
        if (!share[e] || per < *share[e]) share[e] = per;
        if (!cheapest[e] || weights_[c] < *cheapest[e]) cheapest[e] = weights_[c];
      }
    }
    Coord sum = 0, mx = 0;
    for (std::size_t e = 0; e < n_; ++e) {
      if (!uncovered.test(e)) continue;
      sum += *share[e];
      if (*cheapest[e] > mx) mx = *cheapest[e];
    }
    return sum > mx ? sum : mx;
  }

  bool certified() const {
    return has_best_ && options_.lower_bound && best_cost_ <= *options_.lower_bound;
  }

  void search(const ShapeMask& uncovered, const Coord& cost,
              std::vector<std::size_t>& path) {
    if (aborted_ || certified()) return;
    ++nodes_;
    if (options_.node_budget && nodes_ > *options_.node_budget) {
      aborted_ = true;
      return;
    }
    std::optional<std::size_t> branch = uncovered.first();
    if (!branch) {
      if (!has_best_ || cost < best_cost_) {
        best_ = path;
        best_cost_ = cost;
        has_best_ = true;
      }
      return;
    }
    if (has_best_ && cost + lower_bound(uncovered) >= best_cost_) return;
    for (std::size_t c : by_shape_[*branch]) {
      Coord next = cost + weights_[c];
      if (has_best_ && next >= best_cost_) break;  // list sorted by weight
      path.push_back(c);
      search(uncovered.without(cands_.masks[c]), next, path);
      path.pop_back();
      if (aborted_) return;
    }
  }

  const CandidateSet& cands_;
  std::size_t n_;
  ExactOptions options_;
  std::vector<Coord> weights_;
  std::vector<std::vector<std::size_t>> by_shape_;
  std::vector<std::size_t> best_;
  Coord best_cost_ = 0;
  bool has_best_ = false;
  bool aborted_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

// Branch and bound over the candidate set. Branches on the lowest-index
// unstabbed shape; bound is cost so far plus a fractional set-cover bound.
// The returned segments are sorted, and the result does not depend on
// anything but the instance.
inline ExactResult exact_solve(const Instance& inst, const CandidateSet& cands,
                               const ExactOptions& options = {}) {
  ExactResult result;
  if (inst.shapes.empty()) return result;
  GreedyCoverResult g = greedy_setcover(to_setcover(inst, cands));
  detail::BranchAndBound bb(cands, inst.shapes.size(), options);
  bb.seed_incumbent(g.chosen, g.weight);
  bb.run();
  result.nodes = bb.nodes();
  result.status = bb.aborted() ? SolveStatus::kBudgetExceeded : SolveStatus::kOptimal;
  std::vector<HSegment> segs;
  for (std::size_t c : bb.best()) segs.push_back(cands.segments[c]);
  std::sort(segs.begin(), segs.end());
  result.solution = Solution::from_segments(std::move(segs));
  return result;
}

inline ExactResult exact_solve(const Instance& inst, const ExactOptions& options = {}) {
  if (inst.shapes.empty()) return {};
  return exact_solve(inst, candidate_segments(inst), options);
}

}  // namespace stabkit

#endif  // STABKIT_COVER_HPP_
