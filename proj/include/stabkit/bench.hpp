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

// Benchmark suites: seeded instance families run through a list of
// algorithms, one CSV row per (instance, algorithm).
//
// Suite file:
//   {"algorithms": ["exact", "greedy", "lp-scale", "ptas"],
//    "eps": "1/4", "add_cap": 2, "node_budget": 200000,
//    "families": [
//      {"name": "rand", "type": "random", "seed": 1, "instances": 10,
//       "count": 5, "k": 3, "x_max": 8, "y_max": 8},
//      {"name": "vc", "type": "vc", "seed": 1, "instances": 10, "n": 7, "p": 0.5},
//      {"name": "hs", "type": "hitting-set", "seed": 1, "instances": 10,
//       "n": 6, "sets": 6, "max_size": 4}]}

#ifndef STABKIT_BENCH_HPP_
#define STABKIT_BENCH_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "stabkit/cover.hpp"
#include "stabkit/instance_io.hpp"
#include "stabkit/lp_approx.hpp"
#include "stabkit/ptas_dp.hpp"

namespace stabkit {

struct BenchRow {
  std::string instance_id;
  std::size_t n = 0;
  int k = 0;
  std::string algorithm;
  Coord cost;
  Coord lp_bound;
  std::optional<Coord> exact_cost;
  std::optional<int> reference_opt;  // brute-force VC / hitting set size
  std::optional<Coord> ratio_vs_exact;
  std::optional<Coord> ratio_vs_lp;
  double wall_time_ms = 0;
};

struct BenchFamily {
  std::string name;
  std::string type;  // random | vc | hitting-set
  std::uint64_t seed = 1;
  int instances = 1;
  GenParams random;
  int n = 5;
  double p = 0.5;
  int sets = 5;
  int max_size = 3;
};

struct BenchSuite {
  std::vector<std::string> algorithms{"exact", "greedy", "lp-scale"};
  std::vector<BenchFamily> families;
  Coord eps{1, 4};
  std::size_t add_cap = 2;
  std::uint64_t node_budget = 200000;
};

inline BenchSuite parse_suite(const std::string& text) {
  Json j = detail::parse_json(text);
  if (!j.is_object()) throw ParseError("suite: expected an object", 1, 1);
  BenchSuite s;
  try {
    if (j.contains("algorithms")) {
      s.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    }
    for (const std::string& a : s.algorithms) {
      if (a != "exact" && a != "greedy" && a != "lp-scale" && a != "ptas") {
        throw StabError("suite: unknown algorithm '" + a + "'");
      }
    }
    if (j.contains("eps")) s.eps = detail::coord_from_json(j.at("eps"), "eps");
    if (j.contains("add_cap")) s.add_cap = j.at("add_cap").get<std::size_t>();
    if (j.contains("node_budget")) s.node_budget = j.at("node_budget").get<std::uint64_t>();
    if (j.contains("families")) {
      for (const Json& f : j.at("families")) {
        BenchFamily fam;
        fam.type = f.at("type").get<std::string>();
        fam.name = f.value("name", fam.type);
        fam.seed = f.value("seed", std::uint64_t{1});
        fam.instances = f.value("instances", 1);
        if (fam.type == "random") {
          fam.random.count = f.value("count", 5);
          fam.random.k = f.value("k", 2);
          fam.random.x_max = f.value("x_max", 16);
          fam.random.y_max = f.value("y_max", 16);
          fam.random.hourglass_only = f.value("hourglass", false);
          if (f.contains("delta")) {
            fam.random.width_ratio_delta = detail::coord_from_json(f.at("delta"), "delta");
          }
        } else if (fam.type == "vc") {
          fam.n = f.value("n", 5);
          fam.p = f.value("p", 0.5);
        } else if (fam.type == "hitting-set") {
          fam.n = f.value("n", 5);
          fam.sets = f.value("sets", 5);
          fam.max_size = f.value("max_size", 3);
        } else {
          throw StabError("suite: unknown family type '" + fam.type + "'");
        }
        s.families.push_back(std::move(fam));
      }
    }
  } catch (const Json::exception& e) {
    throw StabError(std::string("suite: ") + e.what());
  }
  return s;
}

namespace detail {

inline int brute_vertex_cover(const Graph& g) {
  int best = g.n;
  for (std::uint32_t m = 0; m < (1u << g.n); ++m) {
    bool ok = true;
    for (auto [a, b] : g.edges) {
      if (!((m >> (a - 1)) & 1u) && !((m >> (b - 1)) & 1u)) {
        ok = false;
        break;
      }
    }
    if (ok) best = std::min(best, __builtin_popcount(m));
  }
  return best;
}

inline int brute_hitting_set(const SetSystem& fs) {
  int best = fs.n;
  for (std::uint32_t m = 0; m < (1u << fs.n); ++m) {
    bool ok = true;
    for (const auto& set : fs.sets) {
      bool hit = false;
      for (int e : set) hit = hit || ((m >> (e - 1)) & 1u);
      if (!hit) {
        ok = false;
        break;
      }
    }
    if (ok) best = std::min(best, __builtin_popcount(m));
  }
  return best;
}

struct BenchCase {
  std::string id;
  Instance instance;
  std::optional<int> reference_opt;
};

inline std::vector<BenchCase> expand(const BenchSuite& suite) {
  std::vector<BenchCase> out;
  for (const BenchFamily& f : suite.families) {
    for (int i = 0; i < f.instances; ++i) {
      const std::uint64_t seed = f.seed + static_cast<std::uint64_t>(i);
      BenchCase c;
      c.id = f.name + "-" + std::to_string(seed);
      if (f.type == "random") {
        GenParams gp = f.random;
        gp.seed = seed;
        c.instance = gen_random(gp);
      } else if (f.type == "vc") {
        Graph g = gen_random_graph(seed, f.n, f.p, true);
        c.instance = vc_to_stabbing(g).instance;
        c.reference_opt = brute_vertex_cover(g);
      } else {
        SetSystem fs = gen_random_set_system(seed, f.n, f.sets, f.max_size);
        c.instance = hs_to_stabbing(fs).instance;
        c.reference_opt = brute_hitting_set(fs);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STABKIT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

inline std::vector<BenchRow> run_case(const BenchSuite& suite, const BenchCase& c) {
  const Instance& inst = c.instance;
  CandidateSet cands = candidate_segments(inst);
  const Coord lp = solve_lp(build_lp(inst, cands)).objective;
  auto e0 = std::chrono::steady_clock::now();
  ExactResult exact = exact_solve(inst, cands, {.node_budget = suite.node_budget});
  const auto exact_time = std::chrono::steady_clock::now() - e0;
  std::vector<BenchRow> rows;
  for (const std::string& algo : suite.algorithms) {
    auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    if (algo == "exact") {
      sol = exact.solution;
    } else if (algo == "greedy") {
      sol = greedy_stab(inst);
    } else if (algo == "lp-scale") {
      sol = ok_pipeline(inst, RectStabber::kExact).solution;
    } else {
      sol = ptas_solve(inst, {.eps = suite.eps, .add_cap = suite.add_cap}).solution;
    }
    auto t1 = std::chrono::steady_clock::now();
    FeasibilityReport rep = verify_solution(inst, sol);
    if (!rep.feasible) {
      throw StabError("bench: " + algo + " produced an infeasible solution on " + c.id);
    }
    BenchRow row;
    row.instance_id = c.id;
    row.n = inst.shapes.size();
    row.k = inst.k;
    row.algorithm = algo;
    row.cost = rep.cost;
    row.lp_bound = lp;
    if (exact.optimal()) {
      row.exact_cost = exact.solution.cost;
      if (sgn(*row.exact_cost) > 0) row.ratio_vs_exact = row.cost / *row.exact_cost;
    }
    row.reference_opt = c.reference_opt;
    if (sgn(lp) > 0) row.ratio_vs_lp = row.cost / lp;
    row.wall_time_ms = std::chrono::duration<double, std::milli>(
                           algo == "exact" ? exact_time : t1 - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Runs every (instance, algorithm) pair, instances in parallel
// (STABKIT_THREADS caps the worker count). Rows come back sorted by
// (instance id, algorithm). Throws on any infeasible solution.
inline std::vector<BenchRow> run_bench(const BenchSuite& suite) {
  std::vector<detail::BenchCase> cases = detail::expand(suite);
  std::vector<std::vector<BenchRow>> results(cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        results[i] = detail::run_case(suite, cases[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = std::min<unsigned>(detail::thread_count(),
                                              static_cast<unsigned>(std::max<std::size_t>(1, cases.size())));
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<BenchRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.instance_id, a.algorithm) < std::tie(b.instance_id, b.algorithm);
  });
  return rows;
}

inline const char* kBenchHeader =
    "instance_id,n,k,algorithm,cost,lp_bound,exact_cost,reference_opt,"
    "ratio_vs_exact,ratio_vs_lp,wall_time_ms";

// CSV with exact costs as p/q and ratios as 6-place decimals. Wall time is
// left empty unless with_timing is set, so output is reproducible.
inline std::string bench_csv(const std::vector<BenchRow>& rows, bool with_timing = false) {
  std::ostringstream os;
  os << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    os << r.instance_id << ',' << r.n << ',' << r.k << ',' << r.algorithm << ','
       << format_coord(r.cost) << ',' << format_coord(r.lp_bound) << ','
       << (r.exact_cost ? format_coord(*r.exact_cost) : "") << ','
       << (r.reference_opt ? std::to_string(*r.reference_opt) : "") << ','
       << (r.ratio_vs_exact ? format_decimal(*r.ratio_vs_exact, 6) : "") << ','
       << (r.ratio_vs_lp ? format_decimal(*r.ratio_vs_lp, 6) : "") << ',';
    if (with_timing) {
      std::ostringstream t;
      t.setf(std::ios::fixed);
      t.precision(3);
      t << r.wall_time_ms;
      os << t.str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace stabkit

#endif  // STABKIT_BENCH_HPP_
