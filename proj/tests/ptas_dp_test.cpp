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

#include "stabkit/ptas_dp.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stabkit/instance_io.hpp"

namespace stabkit {
namespace {

Rect R(Coord xl, Coord xr, Coord yb, Coord yt) { return Rect{xl, xr, yb, yt}; }
Coord Q(const char* s) { return parse_coord(s); }

TEST(DiscreteExponent, Examples) {
  EXPECT_EQ(discrete_exponent(Q("1/2"), 4), 4);   // 1/32 < 1/16 <= 1/16
  EXPECT_EQ(discrete_exponent(Q("1/10"), 5), 3);  // 1/5000 < 1/1000 <= 1/500
  EXPECT_EQ(discrete_exponent(Q("1/2"), 1), 2);
  for (int n = 1; n <= 40; ++n) {
    for (const char* e : {"1/2", "1/3", "2/7", "1/10"}) {
      Coord eps = Q(e);
      int d = discrete_exponent(eps, n);
      Coord p = eps_pow(eps, d);
      EXPECT_LT(eps * eps * eps / n, p);
      EXPECT_LE(p, eps * eps / n);
    }
  }
}

TEST(Params, Validation) {
  PtasParams p = make_params(Q("1/2"), 4, 1, 2);
  EXPECT_NO_THROW(validate_params(p, 4));
  EXPECT_EQ(p.live_cap(), 24u);
  EXPECT_THROW(validate_params(p, 40), StabError);
  PtasParams bad = p;
  bad.offset = Q("1/32");
  EXPECT_THROW(validate_params(bad, 4), StabError);
  bad = p;
  bad.eps = Q("3/5");
  EXPECT_THROW(validate_params(bad, 4), StabError);
}

TEST(LevelOf, Boundaries) {
  PtasParams p = make_params(Q("1/2"), 4);
  EXPECT_EQ(level_of(2, p), 0);
  EXPECT_EQ(level_of(Q("3/2"), p), 0);
  EXPECT_EQ(level_of(1, p), 1);
  EXPECT_EQ(level_of(Q("1/2"), p), 2);
  EXPECT_EQ(level_of(Q("1/16"), p), 5);
  EXPECT_FALSE(level_of(Q("21/10"), p).has_value());
  EXPECT_FALSE(level_of(0, p).has_value());
}

TEST(WellAlign, LevelZeroExample) {
  PtasParams p = make_params(Q("1/2"), 4);
  HSegment a = well_align(HSegment{Q("1/8"), Q("13/8"), 3}, p);
  EXPECT_EQ(a, (HSegment{0, 2, 3}));
  EXPECT_TRUE(is_well_aligned(a, p));
}

TEST(WellAlign, OutwardBoundedAndIdempotent) {
  std::mt19937_64 rng(17);
  for (const char* e : {"1/2", "1/3", "1/4"}) {
    PtasParams p = make_params(Q(e), 4);
    const Coord g = p.grid();
    const long steps = floor_int(p.alpha * eps_pow(p.eps, -2) / g).get_si();
    for (int t = 0; t < 400; ++t) {
      p.offset = g * static_cast<long>(rng() % (steps + 1));
      Coord len = g * static_cast<long>(1 + rng() % 400);
      std::optional<int> j = level_of(len, p);
      if (!j || *j >= p.d) continue;
      Coord xl = g * static_cast<long>(rng() % 800);
      HSegment s{xl, xl + len, static_cast<long>(rng() % 9)};
      HSegment a = well_align(s, p);
      EXPECT_LE(a.xl, s.xl);
      EXPECT_GE(a.xr, s.xr);
      EXPECT_EQ(a.y, s.y);
      EXPECT_LE(a.length(), (1 + 2 * p.eps) * s.length());
      EXPECT_TRUE(on_grid(a.xl, *j + 3, p) && on_grid(a.xr, *j + 3, p));
      if (level_of(a.length(), p) == j) EXPECT_EQ(well_align(a, p), a) << "step " << t;
    }
  }
}

TEST(WellAlign, Errors) {
  PtasParams p = make_params(Q("1/2"), 4);
  EXPECT_THROW(well_align(HSegment{0, 1, Q("1/2")}, p), StabError);
  EXPECT_THROW(well_align(HSegment{0, 3, 0}, p), StabError);
  EXPECT_THROW(well_align(HSegment{0, Q("1/32"), 0}, p), StabError);
}

TEST(SplitLongSegments, ThreePieces) {
  const Coord alpha = 1, eps = Q("1/4");
  Instance inst;
  inst.k = 1;
  for (int x = 0; x < 6; ++x) inst.shapes.push_back(KShape{{R(x, x + 1, 0, 1)}});
  Solution sol = Solution::from_segments({HSegment{0, 6, 0}});
  Solution out = split_long_segments(sol, alpha, eps, inst);
  ASSERT_EQ(out.segments.size(), 3u);
  for (const HSegment& s : out.segments) EXPECT_LE(s.length(), alpha / eps);
  EXPECT_TRUE(verify_solution(inst, out).feasible);
  EXPECT_EQ(out.cost, 6);
  EXPECT_THROW(split_long_segments(sol, alpha, Q("1/2"), inst), StabError);
}

TEST(SplitLongSegments, WidenedPiecesCoverStraddlers) {
  std::mt19937_64 rng(5);
  const Coord alpha = 2, eps = Q("1/5");
  for (int t = 0; t < 40; ++t) {
    Instance inst;
    inst.k = 1;
    std::vector<HSegment> segs;
    for (int c = 0; c < 12; ++c) {
      Coord xl(static_cast<long>(rng() % 100), 4);
      Coord w(static_cast<long>(1 + rng() % 8), 4);
      inst.shapes.push_back(KShape{{R(xl, xl + w, 0, 1)}});
    }
    Solution sol = Solution::from_segments({HSegment{0, 27, 0}});
    if (!verify_solution(inst, sol).feasible) continue;
    Solution out = split_long_segments(sol, alpha, eps, inst);
    EXPECT_TRUE(verify_solution(inst, out).feasible);
    for (const HSegment& s : out.segments) EXPECT_LE(s.length(), alpha / eps);
    EXPECT_LE(out.cost, sol.cost + 2 * alpha * out.segments.size());
  }
}

TEST(Discretize, AlreadyDiscreteOnlyCompressesY) {
  const Coord eps = Q("1/10"), alpha = 1;
  Instance inst{2, {KShape{{R(0, 1, 5, 6)}},
                    KShape{{R(Q("1/2"), 1, 6, 8), R(Q("1/2"), Q("3/2"), 8, 9)}}}};
  DiscreteInstance di = discretize(inst, eps, alpha, {.cost = (1 - 2 * eps) * alpha});
  EXPECT_EQ(di.beta, 1);
  EXPECT_TRUE(di.pre_stabbed.empty());
  EXPECT_EQ(di.discarded_parts, 0u);
  YCompression yc = compress_y(inst);
  EXPECT_EQ(di.instance.shapes, yc.instance.shapes);
  EXPECT_TRUE(check_discrete(di).ok());
}

TEST(Discretize, PropertiesAndEnvelope) {
  const Coord eps = Q("1/10"), alpha = 1;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Instance inst = gen_random({.seed = seed,
                                .count = 1 + static_cast<int>(seed % 5),
                                .k = 3, .x_max = 8, .y_max = 8});
    ExactResult opt = exact_solve(inst);
    ASSERT_TRUE(opt.optimal());
    DiscreteInstance di = discretize(inst, eps, alpha);
    ValidationReport props = check_discrete(di);
    for (const std::string& v : props.violations) {
      // only the x-box can fail, for shapes whose rectangles zigzag
      EXPECT_NE(v.find("outside"), std::string::npos) << "seed " << seed << ": " << v;
    }
    Solution lifted;
    if (!di.instance.shapes.empty()) {
      ExactResult d = exact_solve(di.instance);
      ASSERT_TRUE(d.optimal());
      lifted = d.solution;
    }
    Solution back = map_back(di, lifted);
    EXPECT_TRUE(verify_solution(inst, back).feasible) << "seed " << seed;
    EXPECT_GE(back.cost, opt.solution.cost);
    EXPECT_LE(back.cost, (1 + 10 * eps) * opt.solution.cost) << "seed " << seed;
    ++checked;
  }
  EXPECT_EQ(checked, 25);
}

TEST(Discretize, Errors) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  EXPECT_THROW(discretize(Instance{1, {}}, Q("1/10"), 1), StabError);
  EXPECT_THROW(discretize(inst, Q("1/3"), 1), StabError);
  EXPECT_THROW(discretize(inst, Q("1/10"), Q("1/2")), StabError);
}

TEST(DpSolve, SingleUnitSquare) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  PtasParams p = make_params(Q("1/2"), 1, 1, 2);
  DiscreteInstance di = lift_discrete(inst, p);
  DpResult r = dp_solve(di, p);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.solution.cost, 1);
  EXPECT_TRUE(verify_solution(di.instance, r.solution).feasible);
}

TEST(DpSolve, RandomDiscreteFeasibleAndAboveOptimum) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    Instance inst = gen_discrete_instance(seed, n, 2, 2);
    PtasParams p = make_params(Q("1/2"), n, 2, 2);
    DiscreteInstance di = lift_discrete(inst, p);
    ASSERT_TRUE(check_discrete(di).ok()) << "seed " << seed;
    DpResult r = dp_solve(di, p);
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_TRUE(verify_solution(di.instance, r.solution).feasible);
    EXPECT_GE(r.solution.cost, oracle::raw_grid_optimum(di.instance)) << "seed " << seed;
    EXPECT_LE(r.solution.cost, r.dp_value);
    Solution back = map_back(di, r.solution);
    EXPECT_TRUE(verify_solution(inst, back).feasible);
  }
}

TEST(DpSolve, RaisingAddCapNeverHurts) {
  for (std::uint64_t seed = 20; seed <= 26; ++seed) {
    Instance inst = gen_discrete_instance(seed, 3, 2, 2);
    PtasParams p1 = make_params(Q("1/2"), 3, 2, 1);
    PtasParams p2 = make_params(Q("1/2"), 3, 2, 2);
    DiscreteInstance di = lift_discrete(inst, p1);
    EXPECT_LE(dp_solve(di, p2).dp_value, dp_solve(di, p1).dp_value) << "seed " << seed;
  }
}

TEST(DpSolve, BudgetReturnsIncumbent) {
  Instance inst = gen_discrete_instance(3, 4, 2, 2);
  PtasParams p = make_params(Q("1/2"), 4, 2, 2);
  p.cell_budget = 3;
  DiscreteInstance di = lift_discrete(inst, p);
  DpResult r = dp_solve(di, p);
  EXPECT_EQ(r.status, SolveStatus::kBudgetExceeded);
  EXPECT_TRUE(verify_solution(di.instance, r.solution).feasible);
}

TEST(Audit, PassesOnAlignedExactReference) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    Instance inst = gen_discrete_instance(seed, n, 2, 2);
    PtasParams p = make_params(Q("1/2"), n, 2, 2);
    DiscreteInstance di = lift_discrete(inst, p);
    ExactResult opt = exact_solve(di.instance);
    ASSERT_TRUE(opt.optimal());
    Solution ref = aligned_reference(opt.solution, di.instance, p);
    AuditReport a = op_sequence_audit(di, p, ref);
    EXPECT_TRUE(a.ok()) << "seed " << seed << ": "
                        << (a.violations.empty() ? "" : a.violations.front());
    EXPECT_LE(a.max_live, p.live_cap());
  }
}

TEST(Audit, SkippedLineOperationsLeaveStaleSegment) {
  // level-0 segment [0,2] over two unit squares, level-3 segment over a
  // quarter-width square
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}, KShape{{R(1, 2, 0, 1)}},
                    KShape{{R(2, Q("9/4"), 2, 3)}}}};
  PtasParams p = make_params(Q("1/2"), 3, 1, 2);
  DiscreteInstance di = lift_discrete(inst, p);
  ASSERT_TRUE(check_discrete(di).ok());
  Solution ref = Solution::from_segments(
      {HSegment{0, 2, 1}, HSegment{2, Q("9/4"), 2}});
  ASSERT_EQ(level_of(2, p), 0);
  ASSERT_EQ(level_of(Q("1/4"), p), 3);

  EXPECT_TRUE(op_sequence_audit(di, p, ref).ok());

  AuditReport bad = op_sequence_audit(di, p, ref, {.skip_line_levels = {1, 2, 3}});
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.violations.front().find("stale level-0"), std::string::npos)
      << bad.violations.front();
}

TEST(Audit, RejectsUnalignedReference) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  PtasParams p = make_params(Q("1/2"), 1, 1, 1);
  DiscreteInstance di = lift_discrete(inst, p);
  Solution ref = Solution::from_segments({HSegment{Q("-1/8"), Q("11/8"), 0}});
  EXPECT_FALSE(op_sequence_audit(di, p, ref).ok());
}

}  // namespace
}  // namespace stabkit
