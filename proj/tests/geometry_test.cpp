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

#include "stabkit/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

#include "stabkit/cover.hpp"
#include "stabkit/instance_io.hpp"

namespace stabkit {
namespace {

Rect R(Coord xl, Coord xr, Coord yb, Coord yt) { return Rect{xl, xr, yb, yt}; }
Coord Q(const char* s) { return parse_coord(s); }

KShape LShape() { return KShape{{R(0, 1, 0, 1), R(0, 3, 1, 2)}}; }

TEST(Rational, ParsesExactForms) {
  EXPECT_EQ(Q("1/3") * 3, 1);
  EXPECT_EQ(Q("0.25"), Coord(1, 4));
  EXPECT_EQ(Q("-2.5"), Coord(-5, 2));
  EXPECT_EQ(Q("6/4"), Coord(3, 2));
  EXPECT_EQ(Q("7"), 7);
  EXPECT_THROW(Q("1/0"), StabError);
  EXPECT_THROW(Q("abc"), StabError);
  EXPECT_THROW(Q("1e3"), StabError);
  EXPECT_EQ(format_coord(Coord(3, 2)), "3/2");
  EXPECT_EQ(format_decimal(Coord(2, 3)), "0.666667");
  EXPECT_EQ(format_decimal(Coord(-1, 8), 2), "-0.13");
  EXPECT_EQ(harmonic(3), Coord(11, 6));
}

TEST(ValidateKShape, StackedSquaresAreValid) {
  KShape s{{R(0, 1, 0, 1), R(0, 1, 1, 2)}};
  EXPECT_TRUE(validate_kshape(s).ok());
}

TEST(ValidateKShape, VerticalGapIsReported) {
  KShape s{{R(0, 1, 0, 1), R(0, 1, Q("1.5"), 2)}};
  ValidationReport r = validate_kshape(s);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations.front(), "gap between rect 1 and 2");
}

TEST(ValidateKShape, PartialOverlapIsNotAKShape) {
  KShape s{{R(0, 2, 0, 1), R(1, 3, 1, 2)}};
  ValidationReport r = validate_kshape(s);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.violations.front().find("neither edge contains the other"),
            std::string::npos);
}

TEST(ValidateKShape, RespectsDeclaredKAndDegeneracy) {
  KShape s{{R(0, 1, 0, 1), R(0, 1, 1, 2), R(0, 1, 2, 3)}};
  EXPECT_FALSE(validate_kshape(s, {.k = 2}).ok());
  KShape flat{{R(0, 1, 0, 0)}};
  EXPECT_FALSE(validate_kshape(flat).ok());
  EXPECT_TRUE(validate_kshape(flat, {.allow_degenerate = true}).ok());
  EXPECT_FALSE(validate_kshape(KShape{}).ok());
}

TEST(Hourglass, SmallShapesAlwaysQualify) {
  EXPECT_TRUE(is_hourglass(KShape{{R(0, 4, 0, 1)}}));
  EXPECT_TRUE(is_hourglass(LShape()));
  EXPECT_TRUE(is_hourglass(KShape{{R(0, 4, 0, 1), R(1, 2, 1, 2)}}));
}

TEST(Hourglass, WideMiddleFails) {
  KShape s{{R(2, 3, 0, 1), R(0, 5, 1, 2), R(2, 3, 2, 3)}};
  EXPECT_FALSE(is_hourglass(s));
}

TEST(Hourglass, NarrowMiddlePasses) {
  KShape s{{R(0, 5, 0, 1), R(2, 3, 1, 2), R(0, 5, 2, 3)}};
  EXPECT_TRUE(is_hourglass(s));
}

TEST(Hourglass, InvalidShapeThrows) {
  KShape s{{R(0, 2, 0, 1), R(1, 3, 1, 2)}};
  EXPECT_THROW(is_hourglass(s), StabError);
}

TEST(Hourglass, TranslationInvariant) {
  std::mt19937_64 rng(7);
  Instance inst = gen_random({.seed = 11, .count = 40, .k = 4});
  for (const KShape& s : inst.shapes) {
    Coord dx(static_cast<long>(rng() % 17) - 8, 3);
    Coord dy(static_cast<long>(rng() % 9) - 4);
    EXPECT_EQ(is_hourglass(s), is_hourglass(translate(s, dx, dy)));
  }
}

TEST(StabsRect, FullSpanAtMidHeight) {
  Rect r = R(0, 1, 0, 1);
  EXPECT_TRUE(stabs_rect(HSegment{0, 1, Q("1/2")}, r));
  EXPECT_FALSE(stabs_rect(HSegment{0, Q("1/2"), Q("1/2")}, r));
  EXPECT_TRUE(stabs_rect(HSegment{-1, 2, 1}, r));
  EXPECT_TRUE(stabs_rect(HSegment{0, 1, 0}, r));
  EXPECT_FALSE(stabs_rect(HSegment{0, 1, Q("1.0001")}, r));
}

TEST(StabsRect, MonotoneInSpan) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    auto pick = [&] { return Coord(static_cast<long>(rng() % 9)); };
    Coord a = pick(), b = pick(), c = pick(), d = pick();
    Rect r = R(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d));
    Coord x1 = pick(), x2 = pick();
    HSegment s{std::min(x1, x2), std::max(x1, x2), pick()};
    HSegment wider{s.xl - pick(), s.xr + pick(), s.y};
    if (stabs_rect(s, r)) EXPECT_TRUE(stabs_rect(wider, r));
  }
}

TEST(StabsKShape, LShape) {
  KShape l = LShape();
  EXPECT_TRUE(stabs_kshape(HSegment{0, 1, Q("1/2")}, l));
  EXPECT_FALSE(stabs_kshape(HSegment{0, 2, Q("3/2")}, l));
  EXPECT_TRUE(stabs_kshape(HSegment{0, 3, Q("3/2")}, l));
}

TEST(VerifySolution, UnitSquare) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  FeasibilityReport ok = verify_solution(
      inst, Solution::from_segments({HSegment{0, 1, Q("1/2")}}));
  EXPECT_TRUE(ok.feasible);
  EXPECT_EQ(ok.cost, 1);

  FeasibilityReport empty = verify_solution(inst, Solution{});
  EXPECT_FALSE(empty.feasible);
  EXPECT_EQ(empty.unstabbed, std::vector<std::size_t>{0});
  EXPECT_EQ(empty.cost, 0);
}

TEST(VerifySolution, CostMismatchThrows) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  Solution bad = Solution::from_segments({HSegment{0, 1, 0}});
  bad.cost = 2;
  try {
    verify_solution(inst, bad);
    FAIL() << "expected a throw";
  } catch (const StabError& e) {
    EXPECT_NE(std::string(e.what()).find("cost field inconsistent"),
              std::string::npos);
  }
}

TEST(VerifySolution, TriangleReductionWithTwoSegments) {
  Graph k3{3, {{1, 2}, {1, 3}, {2, 3}}};
  ReductionInstance red = vc_to_stabbing(k3);
  Solution sol = Solution::from_segments(
      {HSegment{0, 1, 1}, HSegment{0, 1, 3}});  // tops of s_1 and s_2
  FeasibilityReport r = verify_solution(red.instance, sol);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.cost, 2);
}

TEST(BoundingRect, Examples) {
  EXPECT_EQ(bounding_rect(LShape()), R(0, 3, 0, 2));
  EXPECT_EQ(bounding_rect(KShape{{R(1, 2, 3, 4)}}), R(1, 2, 3, 4));
  EXPECT_EQ(bounding_rect(KShape{{R(0, 3, 0, 1), R(1, 2, 1, 2)}}), R(0, 3, 0, 2));
}

TEST(BoundingRect, ContainsEveryRectAndIsAtLeastWidest) {
  Instance inst = gen_random({.seed = 5, .count = 60, .k = 5});
  for (const KShape& s : inst.shapes) {
    Rect box = bounding_rect(s);
    EXPECT_GE(box.width(), s.w_max());
    for (const Rect& r : s.rects) EXPECT_TRUE(box.contains(r));
  }
}

TEST(WidthStats, Examples) {
  WidthStats a = width_stats(std::vector<KShape>{LShape()});
  EXPECT_EQ(a.w_min, 1);
  EXPECT_EQ(a.w_max, 3);
  EXPECT_EQ(a.w_range, 3);

  WidthStats b = width_stats(
      std::vector<KShape>{KShape{{R(0, 1, 0, 1)}}, KShape{{R(10, 11, 0, 1)}}});
  EXPECT_EQ(b.w_min, 1);
  EXPECT_EQ(b.w_max, 1);
  EXPECT_EQ(b.w_range, 11);

  Graph k3{3, {{1, 2}, {1, 3}, {2, 3}}};
  WidthStats c = width_stats(vc_to_stabbing(k3).instance);
  EXPECT_EQ(c.w_min, 1);
  EXPECT_EQ(c.w_max, 4);
  EXPECT_EQ(c.w_range, 4);

  EXPECT_THROW(width_stats(std::vector<KShape>{}), StabError);
}

TEST(WidthStats, TranslationAndScaling) {
  Instance inst = gen_random({.seed = 9, .count = 12, .k = 3});
  WidthStats base = width_stats(inst);
  std::vector<KShape> moved, scaled;
  for (const KShape& s : inst.shapes) {
    moved.push_back(translate(s, Coord(7, 3), -2));
    scaled.push_back(scale_x(s, Coord(5, 2)));
  }
  WidthStats m = width_stats(moved);
  EXPECT_EQ(m.w_min, base.w_min);
  EXPECT_EQ(m.w_max, base.w_max);
  EXPECT_EQ(m.w_range, base.w_range);
  WidthStats s = width_stats(scaled);
  EXPECT_EQ(s.w_min, base.w_min * Coord(5, 2));
  EXPECT_EQ(s.w_max, base.w_max * Coord(5, 2));
  EXPECT_EQ(s.w_range, base.w_range * Coord(5, 2));
}

TEST(VerifySolution, ExactSolutionsOfGeneratedInstancesAreFeasible) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Instance inst = gen_random({.seed = seed, .count = 5, .k = 3, .x_max = 10});
    ExactResult r = exact_solve(inst);
    ASSERT_TRUE(r.optimal());
    EXPECT_TRUE(verify_solution(inst, r.solution).feasible) << "seed " << seed;
  }
}

}  // namespace
}  // namespace stabkit
