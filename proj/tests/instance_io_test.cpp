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


#include "stabkit/instance_io.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabkit/cover.hpp"

namespace stabkit {
namespace {

Rect R(Coord xl, Coord xr, Coord yb, Coord yt) { return Rect{xl, xr, yb, yt}; }

TEST(InstanceIo, RoundTripOneSquare) {
  Instance inst{1, {KShape{{R(0, 1, 0, 1)}}}};
  Instance back = read_instance(write_instance(inst));
  EXPECT_EQ(back.k, 1);
  ASSERT_EQ(back.shapes.size(), 1u);
  EXPECT_EQ(back.shapes[0].rects, inst.shapes[0].rects);
}

TEST(InstanceIo, RoundTripRationalsAndMeta) {
  Graph g{3, {{1, 2}, {2, 3}}};
  ReductionInstance red = vc_to_stabbing(g);
  red.instance.shapes.push_back(KShape{{R(Coord(1, 3), Coord(7, 2), 0, 1)}});
  InstanceDocument doc = read_instance_document(write_instance(red.instance, red.meta));
  ASSERT_TRUE(doc.meta.has_value());
  EXPECT_EQ(*doc.meta, red.meta);
  ASSERT_EQ(doc.instance.shapes.size(), red.instance.shapes.size());
  for (std::size_t i = 0; i < doc.instance.shapes.size(); ++i) {
    EXPECT_EQ(doc.instance.shapes[i].rects, red.instance.shapes[i].rects);
  }
}

TEST(InstanceIo, ParsesExactThird) {
  Instance inst = read_instance(R"({"k": 1, "shapes": [{"rects": [
      {"xl": "1/3", "xr": 2, "yb": 0, "yt": 1}]}]})");
  EXPECT_EQ(inst.shapes[0].rects[0].xl, Coord(1, 3));
}

TEST(InstanceIo, GapNamesShapeIndex) {
  try {
    read_instance(R"({"k": 2, "shapes": [
        {"rects": [{"xl": 0, "xr": 1, "yb": 0, "yt": 1}]},
        {"rects": [{"xl": 0, "xr": 1, "yb": 0, "yt": 1},
                   {"xl": 0, "xr": 1, "yb": 2, "yt": 3}]}]})");
    FAIL() << "expected a throw";
  } catch (const StabError& e) {
    EXPECT_NE(std::string(e.what()).find("shape 1:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("gap"), std::string::npos) << e.what();
  }
}

TEST(InstanceIo, MalformedJsonReportsPosition) {
  try {
    read_instance("{\n  \"k\": 1,\n  \"shapes\": [\n}");
    FAIL() << "expected a throw";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(InstanceIo, FloatsAreRejected) {
  EXPECT_THROW(read_instance(R"({"k": 1, "shapes": [{"rects": [
      {"xl": 0.5, "xr": 2, "yb": 0, "yt": 1}]}]})"),
               ParseError);
}

TEST(InstanceIo, SolutionRoundTrip) {
  Solution sol = Solution::from_segments(
      {HSegment{Coord(1, 2), 3, 1}, HSegment{0, Coord(5, 4), Coord(-2, 3)}});
  Solution back = read_solution(write_solution(sol));
  EXPECT_EQ(back.segments, sol.segments);
  EXPECT_EQ(back.cost, sol.cost);
}

TEST(InstanceIo, GraphAndSetSystemRoundTrip) {
  Graph g{4, {{1, 2}, {3, 4}}};
  Graph gb = read_graph(write_graph(g));
  EXPECT_EQ(gb.n, 4);
  EXPECT_EQ(gb.edges, g.edges);
  SetSystem fs{4, {{1, 2, 4}, {3}}};
  SetSystem fb = read_set_system(write_set_system(fs));
  EXPECT_EQ(fb.n, 4);
  EXPECT_EQ(fb.sets, fs.sets);
  EXPECT_THROW(read_graph(R"({"n": 2, "edges": [[1, 3]]})"), StabError);
}

TEST(GenRandom, SingleRectangle) {
  Instance inst = gen_random({.seed = 1, .count = 1, .k = 1});
  ASSERT_EQ(inst.shapes.size(), 1u);
  EXPECT_EQ(inst.shapes[0].size(), 1u);
  EXPECT_TRUE(validate_instance(inst).ok());
}

TEST(GenRandom, Deterministic) {
  Instance a = gen_random({.seed = 1, .count = 8, .k = 3});
  Instance b = gen_random({.seed = 1, .count = 8, .k = 3});
  EXPECT_EQ(write_instance(a), write_instance(b));
  Instance c = gen_random({.seed = 2, .count = 8, .k = 3});
  EXPECT_NE(write_instance(a), write_instance(c));
}

TEST(GenRandom, HourglassOnly) {
  Instance inst = gen_random({.seed = 1, .count = 50, .k = 4, .hourglass_only = true});
  ASSERT_EQ(inst.shapes.size(), 50u);
  for (const KShape& s : inst.shapes) EXPECT_TRUE(is_hourglass(s));
}

TEST(GenRandom, WidthRatioBound) {
  Instance inst = gen_random(
      {.seed = 4, .count = 30, .k = 4, .width_ratio_delta = Coord(1, 2)});
  for (const KShape& s : inst.shapes) EXPECT_GE(s.w_min() / s.w_max(), Coord(1, 2));
}

TEST(Reductions, SingleEdgeShape) {
  ReductionInstance red = vc_to_stabbing(Graph{2, {{1, 2}}});
  ASSERT_EQ(red.instance.shapes.size(), 1u);
  std::vector<Rect> want{R(0, 1, 0, 1), R(0, 3, 1, 2), R(0, 1, 2, 3)};
  EXPECT_EQ(red.instance.shapes[0].rects, want);
  EXPECT_EQ(red.instance.k, 3);
}

TEST(Reductions, TriangleAndPath) {
  Graph k3{3, {{1, 2}, {1, 3}, {2, 3}}};
  ReductionInstance red = vc_to_stabbing(k3);
  EXPECT_EQ(red.instance.shapes.size(), 3u);
  EXPECT_EQ(exact_solve(red.instance).solution.cost, oracle::min_vertex_cover(k3));
  Graph path{2, {{1, 2}}};
  EXPECT_EQ(exact_solve(vc_to_stabbing(path).instance).solution.cost, 1);
}

TEST(Reductions, HittingSetConnectors) {
  ReductionInstance red = hs_to_stabbing(SetSystem{4, {{1, 2, 4}}});
  ASSERT_EQ(red.instance.shapes.size(), 1u);
  const KShape& s = red.instance.shapes[0];
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(red.instance.k, 5);
  EXPECT_EQ(s.rects[1], R(0, 5, 1, 2));
  EXPECT_EQ(s.rects[3], R(0, 5, 3, 6));
  EXPECT_TRUE(validate_kshape(s).ok());
}

TEST(Reductions, HittingSetCosts) {
  EXPECT_EQ(exact_solve(hs_to_stabbing(SetSystem{2, {{1}, {2}}}).instance)
                .solution.cost,
            2);
  SetSystem fs{3, {{1, 2}, {2, 3}}};
  EXPECT_EQ(exact_solve(hs_to_stabbing(fs).instance).solution.cost,
            oracle::min_hitting_set(fs));
  EXPECT_EQ(oracle::min_hitting_set(fs), 1);
}

TEST(ExtractCover, TriangleOptimal) {
  Graph k3{3, {{1, 2}, {1, 3}, {2, 3}}};
  ReductionInstance red = vc_to_stabbing(k3);
  Solution sol = Solution::from_segments({HSegment{0, 1, 1}, HSegment{0, 1, 3}});
  std::vector<int> cover = extract_cover(red.instance, red.meta, sol);
  EXPECT_EQ(cover, (std::vector<int>{1, 2}));
  EXPECT_TRUE(is_vertex_cover(k3, cover));
}

TEST(ExtractCover, SingleEdgeUnitSegment) {
  ReductionInstance red = vc_to_stabbing(Graph{2, {{1, 2}}});
  Solution sol = Solution::from_segments({HSegment{0, 1, Coord(1, 2)}});
  EXPECT_EQ(extract_cover(red.instance, red.meta, sol), std::vector<int>{1});
}

TEST(ExtractCover, ConnectorSegmentIsNormalized) {
  SetSystem fs{4, {{1, 2, 4}, {2, 3}}};
  ReductionInstance red = hs_to_stabbing(fs);
  Solution sol = Solution::from_segments({HSegment{0, 5, 1}, HSegment{0, 1, 5}});
  std::vector<int> hit = extract_cover(red.instance, red.meta, sol);
  for (int e : hit) EXPECT_TRUE(e >= 1 && e <= 4);
  EXPECT_TRUE(is_hitting_set(fs, hit));
}

TEST(ExtractCover, RandomGraphsGiveCoversOfOptimalSize) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Graph g = gen_random_graph(seed, 5, 0.5, true);
    ReductionInstance red = vc_to_stabbing(g);
    ExactResult r = exact_solve(red.instance);
    std::vector<int> cover = extract_cover(red.instance, red.meta, r.solution);
    EXPECT_TRUE(is_vertex_cover(g, cover)) << "seed " << seed;
    EXPECT_LE(static_cast<int>(cover.size()), oracle::min_vertex_cover(g));
  }
}

TEST(ExtractCover, InfeasibleThrows) {
  ReductionInstance red = vc_to_stabbing(Graph{2, {{1, 2}}});
  EXPECT_THROW(extract_cover(red.instance, red.meta, Solution{}), StabError);
}

}  // namespace
}  // namespace stabkit
