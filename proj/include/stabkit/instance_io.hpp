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

// Instance and solution files, seeded random instance families, and the
// vertex-cover / hitting-set reduction constructors together with the
// certificate extraction that maps a stabbing back to a cover.

#ifndef STABKIT_INSTANCE_IO_HPP_
#define STABKIT_INSTANCE_IO_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stabkit/geometry.hpp"

namespace stabkit {

using Json = nlohmann::ordered_json;

// Error raised by the readers; carries a 1-based position when the text
// itself is malformed.
class ParseError : public StabError {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : StabError(line > 0 ? "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + what
                           : what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based, first < second
};

struct SetSystem {
  int n = 0;
  std::vector<std::vector<int>> sets;  // 1-based, sorted
};

struct IndexedSquare {
  int index = 0;  // 1-based vertex / element id
  Rect rect;

  friend bool operator==(const IndexedSquare&, const IndexedSquare&) = default;
};

// Helper squares of a reduction instance. They are not input shapes.
struct ReductionMeta {
  std::vector<IndexedSquare> squares;

  friend bool operator==(const ReductionMeta&, const ReductionMeta&) = default;
};

struct InstanceDocument {
  Instance instance;
  std::optional<ReductionMeta> meta;
};

inline void validate_graph(const Graph& g) {
  if (g.n < 0) throw StabError("graph: negative vertex count");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : g.edges) {
    if (i == j) throw StabError("graph: self-loop at vertex " + std::to_string(i));
    if (i < 1 || j < 1 || i > g.n || j > g.n) {
      throw StabError("graph: edge (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") out of range");
    }
    if (!seen.insert(std::minmax(i, j)).second) {
      throw StabError("graph: duplicate edge (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
    }
  }
}

inline void validate_set_system(const SetSystem& fs) {
  if (fs.n < 0) throw StabError("set system: negative element count");
  for (std::size_t s = 0; s < fs.sets.size(); ++s) {
    const auto& set = fs.sets[s];
    if (set.empty()) {
      throw StabError("set system: set " + std::to_string(s) + " is empty");
    }
    for (std::size_t t = 0; t < set.size(); ++t) {
      if (set[t] < 1 || set[t] > fs.n) {
        throw StabError("set system: element " + std::to_string(set[t]) +
                        " out of range in set " + std::to_string(s));
      }
      if (t > 0 && set[t - 1] >= set[t]) {
        throw StabError("set system: set " + std::to_string(s) +
                        " is not sorted and duplicate-free");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON encoding

namespace detail {

inline std::pair<int, int> offset_to_line_col(const std::string& text,
                                              std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = offset_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) {
      what = what.substr(pos);
    }
    throw ParseError(what, line, col);
  }
}

inline const Json& require(const Json& obj, const char* key,
                           const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

inline Coord coord_from_json(const Json& v, const std::string& where) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) {
      return Coord(mpz_class(std::to_string(v.get<std::uint64_t>())));
    }
    return Coord(mpz_class(std::to_string(v.get<std::int64_t>())));
  }
  if (v.is_string()) {
    try {
      return parse_coord(v.get<std::string>());
    } catch (const StabError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where +
                   ": expected an integer or a rational string (floats are "
                   "not accepted)");
}

inline Json coord_to_json(const Coord& c) {
  if (c.get_den() == 1 && c.get_num().fits_slong_p()) {
    return Json(static_cast<std::int64_t>(c.get_num().get_si()));
  }
  return Json(format_coord(c));
}

inline int int_from_json(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

inline Rect rect_from_json(const Json& v, const std::string& where) {
  return Rect{coord_from_json(require(v, "xl", where), where + ".xl"),
              coord_from_json(require(v, "xr", where), where + ".xr"),
              coord_from_json(require(v, "yb", where), where + ".yb"),
              coord_from_json(require(v, "yt", where), where + ".yt")};
}

inline Json rect_to_json(const Rect& r) {
  Json out = Json::object();
  out["xl"] = coord_to_json(r.xl);
  out["xr"] = coord_to_json(r.xr);
  out["yb"] = coord_to_json(r.yb);
  out["yt"] = coord_to_json(r.yt);
  return out;
}

inline const Json& require_array(const Json& obj, const char* key,
                                 const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_array()) {
    throw ParseError(where + ": field \"" + key + "\" must be an array");
  }
  return v;
}

}  // namespace detail

inline Json instance_to_json(const Instance& inst,
                             const std::optional<ReductionMeta>& meta = {}) {
  Json out = Json::object();
  out["k"] = inst.k;
  Json shapes = Json::array();
  for (const KShape& shape : inst.shapes) {
    Json rects = Json::array();
    for (const Rect& r : shape.rects) rects.push_back(detail::rect_to_json(r));
    Json s = Json::object();
    s["rects"] = std::move(rects);
    shapes.push_back(std::move(s));
  }
  out["shapes"] = std::move(shapes);
  if (meta) {
    Json squares = Json::array();
    for (const IndexedSquare& sq : meta->squares) {
      Json e = Json::object();
      e["index"] = sq.index;
      e["rect"] = detail::rect_to_json(sq.rect);
      squares.push_back(std::move(e));
    }
    out["meta"] = Json::object({{"squares", std::move(squares)}});
  }
  return out;
}

inline std::string write_instance(const Instance& inst,
                                  const std::optional<ReductionMeta>& meta = {}) {
  return instance_to_json(inst, meta).dump(2) + "\n";
}

// Parses an instance file and validates every shape against the stacking
// rules and the declared k.
inline InstanceDocument read_instance_document(const std::string& text) {
  Json root = detail::parse_json(text);
  InstanceDocument doc;
  doc.instance.k = detail::int_from_json(detail::require(root, "k", "instance"),
                                         "instance.k");
  const Json& shapes = detail::require_array(root, "shapes", "instance");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    std::string where = "shapes[" + std::to_string(i) + "]";
    const Json& rects = detail::require_array(shapes[i], "rects", where);
    KShape shape;
    for (std::size_t j = 0; j < rects.size(); ++j) {
      shape.rects.push_back(detail::rect_from_json(
          rects[j], where + ".rects[" + std::to_string(j) + "]"));
    }
    doc.instance.shapes.push_back(std::move(shape));
  }
  if (auto it = root.find("meta"); it != root.end() && !it->is_null()) {
    ReductionMeta meta;
    const Json& squares = detail::require_array(*it, "squares", "meta");
    for (std::size_t i = 0; i < squares.size(); ++i) {
      std::string where = "meta.squares[" + std::to_string(i) + "]";
      meta.squares.push_back(IndexedSquare{
          detail::int_from_json(detail::require(squares[i], "index", where),
                                where + ".index"),
          detail::rect_from_json(detail::require(squares[i], "rect", where),
                                 where + ".rect")});
    }
    doc.meta = std::move(meta);
  }
  ValidationReport report = validate_instance(doc.instance);
  if (!report.ok()) throw ParseError("invalid instance: " + report.message());
  return doc;
}

inline Instance read_instance(const std::string& text) {
  return read_instance_document(text).instance;
}

inline std::string write_solution(const Solution& sol) {
  Json out = Json::object();
  Json segs = Json::array();
  for (const HSegment& s : sol.segments) {
    Json e = Json::object();
    e["xl"] = detail::coord_to_json(s.xl);
    e["xr"] = detail::coord_to_json(s.xr);
    e["y"] = detail::coord_to_json(s.y);
    segs.push_back(std::move(e));
  }
  out["segments"] = std::move(segs);
  out["cost"] = detail::coord_to_json(sol.cost);
  return out.dump(2) + "\n";
}

inline Solution read_solution(const std::string& text) {
  Json root = detail::parse_json(text);
  Solution sol;
  const Json& segs = detail::require_array(root, "segments", "solution");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    std::string where = "segments[" + std::to_string(i) + "]";
    HSegment s{detail::coord_from_json(detail::require(segs[i], "xl", where),
                                       where + ".xl"),
               detail::coord_from_json(detail::require(segs[i], "xr", where),
                                       where + ".xr"),
               detail::coord_from_json(detail::require(segs[i], "y", where),
                                       where + ".y")};
    if (s.xl > s.xr) throw ParseError(where + ": xl > xr");
    sol.segments.push_back(std::move(s));
  }
  sol.cost = detail::coord_from_json(detail::require(root, "cost", "solution"),
                                     "solution.cost");
  return sol;
}

inline std::string write_graph(const Graph& g) {
  Json out = Json::object();
  out["n"] = g.n;
  Json edges = Json::array();
  for (auto [i, j] : g.edges) edges.push_back(Json::array({i, j}));
  out["edges"] = std::move(edges);
  return out.dump(2) + "\n";
}

inline Graph read_graph(const std::string& text) {
  Json root = detail::parse_json(text);
  Graph g;
  g.n = detail::int_from_json(detail::require(root, "n", "graph"), "graph.n");
  const Json& edges = detail::require_array(root, "edges", "graph");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::string where = "edges[" + std::to_string(e) + "]";
    if (!edges[e].is_array() || edges[e].size() != 2) {
      throw ParseError(where + ": expected a pair");
    }
    int i = detail::int_from_json(edges[e][0], where);
    int j = detail::int_from_json(edges[e][1], where);
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  validate_graph(g);
  return g;
}

inline std::string write_set_system(const SetSystem& fs) {
  Json out = Json::object();
  out["n"] = fs.n;
  Json sets = Json::array();
  for (const auto& s : fs.sets) sets.push_back(Json(s));
  out["sets"] = std::move(sets);
  return out.dump(2) + "\n";
}

inline SetSystem read_set_system(const std::string& text) {
  Json root = detail::parse_json(text);
  SetSystem fs;
  fs.n = detail::int_from_json(detail::require(root, "n", "set system"),
                               "set system.n");
  const Json& sets = detail::require_array(root, "sets", "set system");
  for (std::size_t s = 0; s < sets.size(); ++s) {
    std::string where = "sets[" + std::to_string(s) + "]";
    if (!sets[s].is_array()) throw ParseError(where + ": expected an array");
    std::vector<int> members;
    for (const Json& v : sets[s]) members.push_back(detail::int_from_json(v, where));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    fs.sets.push_back(std::move(members));
  }
  validate_set_system(fs);
  return fs;
}

// ---------------------------------------------------------------------------
// Random instances

struct GenParams {
  std::uint64_t seed = 1;
  int count = 1;
  int k = 1;
  int x_max = 16;
  int y_max = 16;
  std::optional<Coord> width_ratio_delta;
  bool hourglass_only = false;
};

namespace detail {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Widths in [lo, hi]; arranged as a valley (non-increasing then
// non-decreasing) when an hourglass shape is requested.
inline std::vector<int> draw_widths(std::mt19937_64& rng, int rects, int lo,
                                    int hi, bool hourglass) {
  std::vector<int> widths(static_cast<std::size_t>(rects));
  for (int& w : widths) w = uniform_int(rng, lo, hi);
  if (hourglass && rects > 2) {
    std::sort(widths.begin(), widths.end(), std::greater<>());
    int split = uniform_int(rng, 0, rects);
    std::vector<int> left, right;
    for (int i = 0; i < rects; ++i) {
      // alternate the descending widths between the two arms
      (i % 2 == 0 ? left : right).push_back(widths[static_cast<std::size_t>(i)]);
    }
    if (split % 2 == 1) std::swap(left, right);
    std::reverse(right.begin(), right.end());
    widths = left;
    widths.insert(widths.end(), right.begin(), right.end());
  }
  return widths;
}

}  // namespace detail

// Seeded random k-shapes with integer coordinates inside
// [0, x_max] x [0, y_max]. Deterministic for a fixed parameter set.
inline Instance gen_random(const GenParams& params) {
  if (params.count < 1) throw StabError("gen_random: count must be >= 1");
  if (params.k < 1) throw StabError("gen_random: k must be >= 1");
  if (params.x_max < 1) throw StabError("gen_random: x_max must be >= 1");
  if (params.y_max < params.k) {
    throw StabError("gen_random: y_max must be at least k");
  }
  int w_hi_cap = std::max(1, params.x_max / 2);
  if (params.width_ratio_delta) {
    const Coord& delta = *params.width_ratio_delta;
    if (delta <= 0 || delta > 1) {
      throw StabError("gen_random: width ratio delta must lie in (0, 1]");
    }
  }

  std::mt19937_64 rng(params.seed);
  Instance inst;
  inst.k = params.k;
  for (int c = 0; c < params.count; ++c) {
    int rects = detail::uniform_int(rng, 1, params.k);
    int w_hi = detail::uniform_int(rng, 1, w_hi_cap);
    int w_lo = 1;
    if (params.width_ratio_delta) {
      w_lo = static_cast<int>(ceil_int(*params.width_ratio_delta * w_hi).get_si());
      w_lo = std::max(1, w_lo);
    }
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) {
        throw StabError("gen_random: cannot place a shape inside the bounds");
      }
      std::vector<int> widths =
          detail::draw_widths(rng, rects, w_lo, w_hi, params.hourglass_only);
      // place x-intervals relative to the first rect, nesting the narrower
      // edge inside the wider one at each interface
      std::vector<int> xl(widths.size());
      xl[0] = 0;
      for (std::size_t i = 1; i < widths.size(); ++i) {
        int slack = std::abs(widths[i] - widths[i - 1]);
        int off = detail::uniform_int(rng, 0, slack);
        xl[i] = widths[i] <= widths[i - 1] ? xl[i - 1] + off : xl[i - 1] - off;
      }
      int lo = *std::min_element(xl.begin(), xl.end());
      int hi = lo;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        hi = std::max(hi, xl[i] + widths[i]);
      }
      if (hi - lo > params.x_max) continue;
      int shift = detail::uniform_int(rng, 0, params.x_max - (hi - lo)) - lo;

      int max_height = std::max(1, params.y_max / rects);
      std::vector<int> heights(widths.size());
      int total = 0;
      for (int& h : heights) {
        h = detail::uniform_int(rng, 1, std::min(3, max_height));
        total += h;
      }
      if (total > params.y_max) continue;
      int y = detail::uniform_int(rng, 0, params.y_max - total);

      KShape shape;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        shape.rects.push_back(Rect{Coord(xl[i] + shift),
                                   Coord(xl[i] + shift + widths[i]), Coord(y),
                                   Coord(y + heights[i])});
        y += heights[i];
      }
      inst.shapes.push_back(std::move(shape));
      break;
    }
  }
  return inst;
}

inline Graph gen_random_graph(std::uint64_t seed, int n, double edge_prob,
                              bool connected) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  for (;;) {
    Graph g{n, {}};
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        if (coin(rng)) g.edges.emplace_back(i, j);
      }
    }
    if (!connected) return g;
    // union-find connectivity check
    std::vector<int> parent(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        x = parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      }
      return x;
    };
    int components = n;
    for (auto [i, j] : g.edges) {
      int a = find(i), b = find(j);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        --components;
      }
    }
    if (components <= 1) return g;
  }
}

inline SetSystem gen_random_set_system(std::uint64_t seed, int n, int num_sets,
                                       int max_set_size) {
  std::mt19937_64 rng(seed);
  SetSystem fs{n, {}};
  for (int s = 0; s < num_sets; ++s) {
    int size = detail::uniform_int(rng, 1, std::min(max_set_size, n));
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> set(all.begin(), all.begin() + size);
    std::sort(set.begin(), set.end());
    fs.sets.push_back(std::move(set));
  }
  return fs;
}

// ---------------------------------------------------------------------------
// Hardness reductions

struct ReductionInstance {
  Instance instance;
  ReductionMeta meta;
};

// Unit square whose top-left corner sits at (0, 2i - 1).
inline Rect helper_square(int i) {
  return Rect{0, 1, Coord(2 * i - 2), Coord(2 * i - 1)};
}

namespace detail {

inline ReductionMeta squares_meta(int n) {
  ReductionMeta meta;
  for (int i = 1; i <= n; ++i) meta.squares.push_back({i, helper_square(i)});
  return meta;
}

// Square chain s_{i_1}, connector, s_{i_2}, ..., s_{i_f}; connectors span
// [0, n + 1] between consecutive squares.
inline KShape square_chain(const std::vector<int>& members, int n) {
  KShape shape;
  for (std::size_t t = 0; t < members.size(); ++t) {
    if (t > 0) {
      shape.rects.push_back(Rect{0, Coord(n + 1), Coord(2 * members[t - 1] - 1),
                                 Coord(2 * members[t] - 2)});
    }
    shape.rects.push_back(helper_square(members[t]));
  }
  return shape;
}

}  // namespace detail

// One 3-shape per edge {i, j}: s_i, [0, n+1] x [2i-1, 2j-2], s_j.
inline ReductionInstance vc_to_stabbing(const Graph& g) {
  validate_graph(g);
  if (g.edges.empty()) throw StabError("vc_to_stabbing: graph has no edges");
  ReductionInstance out;
  out.instance.k = 3;
  for (auto [a, b] : g.edges) {
    auto [i, j] = std::minmax(a, b);
    out.instance.shapes.push_back(detail::square_chain({i, j}, g.n));
  }
  out.meta = detail::squares_meta(g.n);
  return out;
}

// One (2f-1)-shape per set of size f, alternating squares and connectors.
inline ReductionInstance hs_to_stabbing(const SetSystem& fs) {
  validate_set_system(fs);
  if (fs.sets.empty()) throw StabError("hs_to_stabbing: family is empty");
  ReductionInstance out;
  out.instance.k = 1;
  for (const auto& set : fs.sets) {
    out.instance.shapes.push_back(detail::square_chain(set, fs.n));
    out.instance.k = std::max(out.instance.k, 2 * static_cast<int>(set.size()) - 1);
  }
  out.meta = detail::squares_meta(fs.n);
  return out;
}

// Maps a feasible stabbing of a reduction instance back to the indices of
// helper squares (vertices / elements). Each segment is first normalized to
// unit segments on squares: a segment that stabs a shape through one of its
// squares keeps that square; a segment stabbing through a connector (length
// >= n + 1) is charged to the lowest square of that shape.
inline std::vector<int> extract_cover(const Instance& inst,
                                      const ReductionMeta& meta,
                                      const Solution& sol) {
  FeasibilityReport feas = verify_solution(inst, sol);
  if (!feas.feasible) {
    throw StabError("extract_cover: solution leaves " +
                    std::to_string(feas.unstabbed.size()) +
                    " shape(s) unstabbed");
  }
  auto square_index = [&](const Rect& r) -> std::optional<int> {
    for (const IndexedSquare& sq : meta.squares) {
      if (sq.rect == r) return sq.index;
    }
    return std::nullopt;
  };

  std::set<int> chosen;
  for (const HSegment& seg : sol.segments) {
    std::set<int> from_segment;
    for (const KShape& shape : inst.shapes) {
      if (!stabs_kshape(seg, shape)) continue;
      std::optional<int> direct;
      std::optional<int> lowest;
      for (const Rect& r : shape.rects) {
        std::optional<int> idx = square_index(r);
        if (!idx) continue;
        if (!lowest || *idx < *lowest) lowest = idx;
        if (stabs_rect(seg, r) && (!direct || *idx < *direct)) direct = idx;
      }
      if (direct) {
        from_segment.insert(*direct);
      } else if (lowest) {
        from_segment.insert(*lowest);
      } else {
        throw StabError("extract_cover: shape without helper squares");
      }
    }
    chosen.insert(from_segment.begin(), from_segment.end());
  }
  return {chosen.begin(), chosen.end()};
}

inline bool is_vertex_cover(const Graph& g, const std::vector<int>& cover) {
  std::set<int> c(cover.begin(), cover.end());
  return std::all_of(g.edges.begin(), g.edges.end(), [&](auto e) {
    return c.count(e.first) > 0 || c.count(e.second) > 0;
  });
}

inline bool is_hitting_set(const SetSystem& fs, const std::vector<int>& hit) {
  std::set<int> h(hit.begin(), hit.end());
  return std::all_of(fs.sets.begin(), fs.sets.end(), [&](const auto& set) {
    return std::any_of(set.begin(), set.end(),
                       [&](int e) { return h.count(e) > 0; });
  });
}

}  // namespace stabkit

#endif  // STABKIT_INSTANCE_IO_HPP_
