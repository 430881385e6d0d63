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

// stabkit command-line tool.
//
// Exit codes: 0 success, 1 infeasible solution / failed check / solver
// error, 2 usage or input error. Machine-readable output goes to stdout,
// diagnostics to stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "stabkit/stabkit.hpp"

namespace stabkit {
namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// Input problems (unreadable files, bad JSON, invalid shapes) map to exit 2.
struct InputError : StabError {
  using StabError::StabError;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

template <typename F>
auto parse_input(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const StabError& e) {
    throw InputError(what + ": " + e.what());
  }
}

Instance load_instance(const std::string& path) {
  return parse_input(path, [&] { return read_instance(slurp(path)); });
}

Solution load_solution(const std::string& path) {
  return parse_input(path, [&] { return read_solution(slurp(path)); });
}

Coord parse_rational_flag(const std::string& flag, const std::string& text) {
  try {
    return parse_coord(text);
  } catch (const StabError& e) {
    throw InputError(flag + ": " + e.what());
  }
}

RectStabber parse_stabber(const std::string& s) {
  return s == "greedy" ? RectStabber::kGreedy : RectStabber::kExact;
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string type = "random";
  std::uint64_t seed = 1;
  int count = 5;
  int k = 2;
  int x_max = 16;
  int y_max = 16;
  bool hourglass = false;
  std::string delta;
  std::string graph, sets, out;
  double edge_prob = 0.5;
  int num_sets = 5;
  int max_size = 3;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.type == "random") {
    GenParams p{.seed = a.seed, .count = a.count, .k = a.k, .x_max = a.x_max,
                .y_max = a.y_max, .hourglass_only = a.hourglass};
    if (!a.delta.empty()) p.width_ratio_delta = parse_rational_flag("--delta", a.delta);
    emit(a.out, write_instance(gen_random(p)));
  } else if (a.type == "vc") {
    Graph g = a.graph.empty()
                  ? gen_random_graph(a.seed, a.count, a.edge_prob, true)
                  : parse_input(a.graph, [&] { return read_graph(slurp(a.graph)); });
    ReductionInstance red = vc_to_stabbing(g);
    emit(a.out, write_instance(red.instance, red.meta));
  } else {
    SetSystem fs = a.sets.empty()
                       ? gen_random_set_system(a.seed, a.count, a.num_sets, a.max_size)
                       : parse_input(a.sets, [&] { return read_set_system(slurp(a.sets)); });
    ReductionInstance red = hs_to_stabbing(fs);
    emit(a.out, write_instance(red.instance, red.meta));
  }
  return kOk;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string algo = "exact";
  std::string eps = "1/4";
  std::string alpha = "1";
  std::size_t add_cap = 2;
  bool offset_sweep = false;
  std::string stabber = "exact";
  std::optional<std::uint64_t> budget;
  std::string in, out;
};

int cmd_solve(const SolveArgs& a) {
  Instance inst = load_instance(a.in);
  std::ostringstream stats;
  Solution sol;
  std::string status = "optimal";
  if (a.algo == "exact") {
    ExactResult r = exact_solve(inst, {.node_budget = a.budget});
    sol = r.solution;
    status = to_string(r.status);
    stats << "nodes=" << r.nodes << '\n';
  } else if (a.algo == "greedy") {
    sol = greedy_stab(inst);
    status = "heuristic";
  } else if (a.algo == "lp-scale") {
    OkResult r = ok_pipeline(inst, parse_stabber(a.stabber), {.node_budget = a.budget});
    sol = r.solution;
    status = to_string(r.status);
    stats << "selected_rects=" << r.selected.size() << '\n';
  } else {
    PtasOptions o;
    o.eps = parse_rational_flag("--eps", a.eps);
    o.alpha = parse_rational_flag("--alpha", a.alpha);
    o.add_cap = a.add_cap;
    o.offset_sweep = a.offset_sweep;
    o.stabber = parse_stabber(a.stabber);
    o.cell_budget = a.budget;
    PtasSolveResult r = ptas_solve(inst, o);
    sol = r.solution;
    status = to_string(r.dp.status);
    const DpStats& s = r.dp.stats;
    stats << "discretized=" << (r.lifted ? "no" : "yes") << '\n'
          << "offset=" << format_coord(r.offset) << '\n'
          << "offsets_tried=" << r.offsets_tried << '\n'
          << "cells=" << s.cells << '\n'
          << "memo_hits=" << s.memo_hits << '\n'
          << "trivial_ops=" << s.trivial_ops << '\n'
          << "add_ops=" << s.add_ops << '\n'
          << "line_ops=" << s.line_ops << '\n'
          << "rect_stab_calls=" << s.rect_stab_calls << '\n'
          << "pool_size=" << s.pool_size << '\n';
  }
  FeasibilityReport rep = verify_solution(inst, sol);
  if (!rep.feasible) {
    std::cerr << "solve: internal error, " << a.algo << " produced an infeasible solution\n";
    return kFailed;
  }
  Coord lp = 0;
  if (!inst.shapes.empty()) lp = solve_lp(build_lp(inst, candidate_segments(inst))).objective;

  std::ostringstream summary;
  summary << "algorithm=" << a.algo << '\n'
          << "status=" << status << '\n'
          << "cost=" << format_coord(rep.cost) << '\n'
          << "segments=" << sol.segments.size() << '\n'
          << "lp_bound=" << format_coord(lp) << '\n';
  if (sgn(lp) > 0) summary << "ratio_vs_lp=" << format_decimal(rep.cost / lp, 6) << '\n';
  summary << stats.str();

  if (a.out.empty() || a.out == "-") {
    std::cout << write_solution(sol);
    std::cerr << summary.str();
  } else {
    emit(a.out, write_solution(sol));
    std::cout << summary.str();
  }
  return kOk;
}

// --- verify / lowerbound ---------------------------------------------------

int cmd_verify(const std::string& in, const std::string& sol_path) {
  Instance inst = load_instance(in);
  Solution sol = load_solution(sol_path);
  FeasibilityReport rep = verify_solution(inst, sol);
  if (rep.feasible) {
    std::cout << "feasible cost=" << format_coord(rep.cost) << '\n';
    return kOk;
  }
  std::cout << "infeasible unstabbed=";
  for (std::size_t i = 0; i < rep.unstabbed.size(); ++i) {
    std::cout << (i ? "," : "") << rep.unstabbed[i];
  }
  std::cout << '\n';
  return kFailed;
}

int cmd_lowerbound(const std::string& in) {
  Instance inst = load_instance(in);
  if (inst.shapes.empty()) {
    std::cout << "lp_bound=0\ncandidates=0\n";
    return kOk;
  }
  CandidateSet cands = candidate_segments(inst);
  FracSolution frac = solve_lp(build_lp(inst, cands));
  std::cout << "lp_bound=" << format_coord(frac.objective) << '\n'
            << "lp_bound_decimal=" << format_decimal(frac.objective, 6) << '\n'
            << "candidates=" << cands.size() << '\n'
            << "pivots=" << frac.pivots << '\n';
  return kOk;
}

// --- decompose -------------------------------------------------------------

int cmd_decompose(const std::string& in, const std::string& mu_text,
                  const std::string& offset_text, bool search) {
  Instance inst = load_instance(in);
  const Coord mu = parse_rational_flag("--mu", mu_text);
  StripPartition part;
  std::optional<Coord> rest_cost;
  if (search) {
    OffsetSearch s = best_offset(inst, mu, RestCost::kExact);
    part = s.partition;
    rest_cost = s.rest_cost;
  } else {
    Coord z = offset_text.empty() ? Coord(0) : parse_rational_flag("--offset", offset_text);
    part = strip_partition(inst, mu, z);
  }
  ValidationReport check = check_partition(inst, part);
  Json out = Json::object();
  out["mu"] = format_coord(part.mu);
  out["z"] = format_coord(part.z);
  out["spacing"] = format_coord(part.spacing);
  Json strips = Json::array();
  for (const Strip& s : part.strips) {
    Json j = Json::object();
    j["index"] = s.index;
    j["xl"] = format_coord(s.xl);
    j["xr"] = format_coord(s.xr);
    j["shapes"] = s.shapes;
    strips.push_back(std::move(j));
  }
  out["strips"] = std::move(strips);
  out["rest"] = part.rest;
  if (rest_cost) out["rest_cost"] = format_coord(*rest_cost);
  out["valid"] = check.ok();
  std::cout << out.dump(2) << '\n';
  for (const std::string& v : check.violations) std::cerr << "partition: " << v << '\n';
  return check.ok() ? kOk : kFailed;
}

// --- bench / render --------------------------------------------------------

int cmd_bench(const std::string& suite_path, bool timing) {
  BenchSuite suite = parse_input(suite_path, [&] { return parse_suite(slurp(suite_path)); });
  std::cout << bench_csv(run_bench(suite), timing);
  return kOk;
}

int cmd_render(const std::string& in, const std::string& sol_path, const std::string& out) {
  Instance inst = load_instance(in);
  std::optional<Solution> sol;
  if (!sol_path.empty()) sol = load_solution(sol_path);
  emit(out, render_svg(inst, sol));
  return kOk;
}

}  // namespace
}  // namespace stabkit

int main(int argc, char** argv) {
  using namespace stabkit;
  CLI::App app{"Stabbing k-shapes with horizontal segments"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a random or reduction instance");
  g->add_option("--type", gen.type)->check(CLI::IsMember({"random", "vc", "hitting-set"}));
  g->add_option("--seed", gen.seed);
  g->add_option("--count", gen.count, "shapes (random), vertices (vc) or elements");
  g->add_option("--k", gen.k);
  g->add_option("--x-max", gen.x_max);
  g->add_option("--y-max", gen.y_max);
  g->add_flag("--hourglass", gen.hourglass);
  g->add_option("--delta", gen.delta, "minimum w_min/w_max per shape, p/q");
  g->add_option("--edge-prob", gen.edge_prob);
  g->add_option("--sets", gen.sets, "set system file (hitting-set)");
  g->add_option("--num-sets", gen.num_sets);
  g->add_option("--max-size", gen.max_size);
  g->add_option("--graph", gen.graph, "graph file (vc)");
  g->add_option("-o,--output", gen.out);

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve an instance");
  s->add_option("--algo", sol.algo)
      ->check(CLI::IsMember({"exact", "greedy", "lp-scale", "ptas"}));
  s->add_option("--eps", sol.eps);
  s->add_option("--alpha", sol.alpha);
  s->add_option("--add-cap", sol.add_cap)->check(CLI::PositiveNumber);
  s->add_flag("--offset-sweep", sol.offset_sweep);
  s->add_option("--stabber", sol.stabber)->check(CLI::IsMember({"exact", "greedy"}));
  s->add_option("--budget", sol.budget);
  s->add_option("-i,--input", sol.in)->required();
  s->add_option("-o,--output", sol.out);

  std::string vin, vsol;
  auto* v = app.add_subcommand("verify", "Check a solution against an instance");
  v->add_option("-i,--input", vin)->required();
  v->add_option("-s,--solution", vsol)->required();

  std::string lin;
  auto* l = app.add_subcommand("lowerbound", "Print the LP lower bound");
  l->add_option("-i,--input", lin)->required();

  std::string din, dmu, doff;
  bool dsearch = false;
  auto* d = app.add_subcommand("decompose", "Partition an instance into vertical strips");
  d->add_option("-i,--input", din)->required();
  d->add_option("--mu", dmu)->required();
  auto* off = d->add_option("--offset", doff);
  d->add_flag("--search", dsearch)->excludes(off);

  std::string suite;
  bool timing = false;
  auto* b = app.add_subcommand("bench", "Run a benchmark suite, CSV on stdout");
  b->add_option("--suite", suite)->required();
  b->add_flag("--timing", timing, "fill the wall_time_ms column");

  std::string rin, rsol, rout;
  auto* r = app.add_subcommand("render", "Draw an instance and solution as SVG");
  r->add_option("-i,--input", rin)->required();
  r->add_option("-s,--solution", rsol);
  r->add_option("-o,--output", rout)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*v) return cmd_verify(vin, vsol);
    if (*l) return cmd_lowerbound(lin);
    if (*d) return cmd_decompose(din, dmu, doff, dsearch);
    if (*b) return cmd_bench(suite, timing);
    if (*r) return cmd_render(rin, rsol, rout);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
