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


// Instance builders shared by unit and acceptance tests.

#ifndef STABKIT_TESTS_FIXTURES_HPP_
#define STABKIT_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>

#include "stabkit/cover.hpp"
#include "stabkit/geometry.hpp"

namespace stabkit::fixture {

// A strip [0, width] holding `count` rectangle-stacks of width <= w at
// scattered heights. Reference: greedy.
struct SyntheticStrip {
  Instance shapes;
  Coord width;
  Solution reference;
};

inline SyntheticStrip MakeStrip(std::uint64_t seed, int count, int w, const Coord& mu) {
  std::mt19937_64 rng(seed);
  SyntheticStrip out;
  out.width = Coord(w) / mu;
  long span = floor_int(out.width).get_si();
  out.shapes.k = 2;
  for (int i = 0; i < count; ++i) {
    long width = 1 + static_cast<long>(rng() % static_cast<unsigned long>(w));
    long x = static_cast<long>(rng() % static_cast<unsigned long>(span - width + 1));
    long y = static_cast<long>(rng() % static_cast<unsigned long>(2 * count));
    KShape s{{Rect{x, x + width, y, y + 1}}};
    if (rng() % 2 == 0 && width > 1) s.rects.push_back(Rect{x, x + 1, y + 1, y + 2});
    out.shapes.shapes.push_back(std::move(s));
  }
  out.reference = greedy_stab(out.shapes);
  return out;
}

}  // namespace stabkit::fixture

#endif  // STABKIT_TESTS_FIXTURES_HPP_
