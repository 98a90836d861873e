// Copyright 2026 The tdsp Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tdsp/tdsp.hpp"

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw tdsp::TdspError("cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw tdsp::TdspError("cannot write " + path);
  return os;
}

tdsp::TreeDecomposition read_index_file(const std::string& path) {
  auto is = open_in(path);
  return tdsp::read_index(is);
}

int default_threads() {
  if (const char* env = std::getenv("TDSP_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

std::string method_name(const tdsp::ShortcutSet& s) {
  if (s.strategy == "dp") return "dp-shortcuts";
  if (s.strategy == "greedy") return "greedy-shortcuts";
  return s.strategy + "-shortcuts";
}

struct GenGraphArgs {
  int n = 100;
  double avg_degree = 3.0;
  int breakpoints = 3;
  std::uint64_t seed = 1;
  std::string kind = "random";
  int rows = 0, cols = 0;
  std::string out;
};

struct GenQueriesArgs {
  std::string graph;
  int pairs = 1000;
  int intervals = 10;
  std::uint64_t seed = 1;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-dependent shortest path index: build, select shortcuts, query"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate synthetic graphs and workloads");
  gen->require_subcommand(1);

  GenGraphArgs gg;
  auto* gen_graph = gen->add_subcommand("graph", "generate a random or grid graph");
  gen_graph->add_option("--n", gg.n, "vertex count (random kind)");
  gen_graph->add_option("--avg-degree", gg.avg_degree, "average directed degree");
  gen_graph->add_option("-c,--breakpoints", gg.breakpoints, "breakpoints per edge [2,6]");
  gen_graph->add_option("--seed", gg.seed, "rng seed");
  gen_graph->add_option("--kind", gg.kind, "random | grid")
      ->check(CLI::IsMember({"random", "grid"}));
  gen_graph->add_option("--rows", gg.rows, "grid rows");
  gen_graph->add_option("--cols", gg.cols, "grid cols");
  gen_graph->add_option("-o,--out", gg.out, "output graph file")->required();

  GenQueriesArgs gq;
  auto* gen_queries_cmd = gen->add_subcommand("queries", "generate a query workload");
  gen_queries_cmd->add_option("--graph", gq.graph, "graph file")->required();
  gen_queries_cmd->add_option("--pairs", gq.pairs, "number of vertex pairs");
  gen_queries_cmd->add_option("--intervals", gq.intervals, "time intervals per day");
  gen_queries_cmd->add_option("--seed", gq.seed, "rng seed");
  gen_queries_cmd->add_option("-o,--out", gq.out, "output query file")->required();

  // ---- validate ----
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a graph file, reporting all violations");
  validate->add_option("graph", validate_path, "graph file")->required();

  // ---- build ----
  std::string build_graph, build_out;
  auto* build = app.add_subcommand("build", "build the tree index from a graph");
  build->add_option("graph", build_graph, "graph file")->required();
  build->add_option("-o,--out", build_out, "output index file")->required();

  // ---- select ----
  std::string sel_index, sel_out, sel_strategy = "greedy";
  long sel_budget = -1;
  double sel_frac = -1.0;
  auto* select = app.add_subcommand("select", "select shortcuts under a breakpoint budget");
  select->add_option("index", sel_index, "index file")->required();
  select->add_option("-N,--budget", sel_budget, "budget in stored breakpoints");
  select->add_option("--budget-frac", sel_frac, "budget as a fraction of total candidate weight");
  select->add_option("--strategy", sel_strategy, "dp | greedy")
      ->check(CLI::IsMember({"dp", "greedy"}));
  select->add_option("-o,--out", sel_out, "output manifest file")->required();

  // ---- query ----
  std::string q_index, q_manifest, q_queries, q_mode = "scalar", q_out;
  bool q_path = false;
  auto* query = app.add_subcommand("query", "answer queries from a file");
  query->add_option("index", q_index, "index file")->required();
  query->add_option("--manifest", q_manifest, "shortcut manifest (optional)");
  query->add_option("--queries", q_queries, "query file")->required();
  query->add_option("--mode", q_mode, "scalar | profile")
      ->check(CLI::IsMember({"scalar", "profile"}));
  query->add_flag("--path", q_path, "append the reconstructed path (scalar mode)");
  query->add_option("-o,--out", q_out, "output file (default stdout)");

  // ---- bench ----
  std::string b_index, b_queries, b_mode = "scalar", b_out, b_summary_out;
  std::vector<std::string> b_manifests;
  bool b_oracle = false;
  int b_repeat = 10, b_threads = default_threads();
  auto* bench = app.add_subcommand("bench", "benchmark query methods, CSV output");
  bench->add_option("index", b_index, "index file")->required();
  bench->add_option("--manifest", b_manifests, "shortcut manifest (repeatable)");
  bench->add_option("--queries", b_queries, "query file")->required();
  bench->add_option("--mode", b_mode, "scalar | profile")
      ->check(CLI::IsMember({"scalar", "profile"}));
  bench->add_flag("--oracle", b_oracle, "verify every result against the oracle");
  bench->add_option("--repeat", b_repeat, "timings per query (median recorded)");
  bench->add_option("--threads", b_threads, "worker threads (default $TDSP_THREADS or 1)");
  bench->add_option("-o,--out", b_out, "records CSV file (default stdout)");
  bench->add_option("--summary-out", b_summary_out, "summary CSV file (default stderr)");

  // ---- update ----
  std::string u_index, u_manifest, u_updates, u_out_index, u_out_manifest;
  auto* update = app.add_subcommand("update", "apply edge weight updates to index and manifest");
  update->add_option("index", u_index, "index file")->required();
  update->add_option("--manifest", u_manifest, "manifest file")->required();
  update->add_option("--updates", u_updates, "updates file")->required();
  update->add_option("--out-index", u_out_index, "output index (default: in place)");
  update->add_option("--out-manifest", u_out_manifest, "output manifest (default: in place)");

  try {
    app.parse(argc, argv);

    if (*gen_graph) {
      tdsp::TDGraph g;
      if (gg.kind == "grid") {
        if (gg.rows < 1 || gg.cols < 1)
          throw tdsp::InfeasibleParameters("grid kind needs --rows and --cols");
        g = tdsp::generate_grid_graph(gg.rows, gg.cols, gg.breakpoints, gg.seed);
      } else {
        g = tdsp::generate_graph(gg.n, gg.avg_degree, gg.breakpoints, gg.seed);
      }
      auto os = open_out(gg.out);
      os << "c synthetic stand-in weights (diurnal sinusoid), not calibrated to any real dataset\n";
      tdsp::write_graph(g, os);
      std::cerr << "n=" << g.n() << " m=" << g.m() << " -> " << gg.out << "\n";
    } else if (*gen_queries_cmd) {
      auto is = open_in(gq.graph);
      tdsp::TDGraph g = tdsp::load_graph(is);
      auto qs = tdsp::gen_queries(g, gq.pairs, gq.intervals, gq.seed);
      auto os = open_out(gq.out);
      tdsp::write_queries(qs, os);
      std::cerr << qs.size() << " queries -> " << gq.out << "\n";
    } else if (*validate) {
      auto is = open_in(validate_path);
      tdsp::LoadReport rep = tdsp::load_graph_lenient(is);
      for (const auto& v : rep.violations)
        std::cout << "line " << v.line << ": " << v.message << "\n";
      std::cout << (rep.ok() ? "ok" : "invalid") << " n=" << rep.graph.n()
                << " m=" << rep.graph.m() << " violations=" << rep.violations.size()
                << "\n";
      return rep.ok() ? 0 : 2;
    } else if (*build) {
      auto is = open_in(build_graph);
      tdsp::TDGraph g = tdsp::load_graph(is);
      tdsp::TreeDecomposition tree = tdsp::build_tfp_tree(g);
      auto os = open_out(build_out);
      tdsp::write_index(tree, os);
      std::cout << "n=" << g.n() << " m=" << g.m()
                << " treewidth=" << tree.treewidth()
                << " treeheight=" << tree.treeheight() << "\n";
    } else if (*select) {
      tdsp::TreeDecomposition tree = read_index_file(sel_index);
      tdsp::CandidateSet cands = tdsp::build_all_candidates(tree);
      long total = cands.total_weight();
      long budget;
      if (sel_budget >= 0) {
        budget = sel_budget;
      } else if (sel_frac >= 0.0) {
        budget = std::lround(sel_frac * total);
      } else {
        throw tdsp::InfeasibleParameters("need --budget or --budget-frac");
      }
      tdsp::SelectionResult sel = sel_strategy == "dp"
                                      ? tdsp::select_dp(cands, budget)
                                      : tdsp::select_greedy(cands, budget);
      auto os = open_out(sel_out);
      tdsp::write_manifest(cands, sel, sel_strategy, os);
      std::cout << "candidates=" << cands.pairs.size()
                << " total_weight=" << total << " budget=" << budget
                << " selected=" << sel.selected.size()
                << " selected_weight=" << sel.total_weight
                << " utility=" << tdsp::detail::format_double(sel.total_utility)
                << "\n";
    } else if (*query) {
      tdsp::TreeDecomposition tree = read_index_file(q_index);
      tdsp::ShortcutSet shortcuts;
      bool with_shortcuts = !q_manifest.empty();
      if (with_shortcuts) {
        auto is = open_in(q_manifest);
        shortcuts = tdsp::read_manifest(is);
        if (shortcuts.fingerprint != tree.fingerprint())
          throw tdsp::StaleSelection("manifest does not match this index");
      }
      auto qis = open_in(q_queries);
      auto qs = tdsp::load_queries(qis, tree.graph());
      tdsp::QueryMode mode =
          q_mode == "profile" ? tdsp::QueryMode::profile : tdsp::QueryMode::scalar;
      std::ofstream of;
      std::ostream* os = &std::cout;
      if (!q_out.empty()) {
        of = open_out(q_out);
        os = &of;
      }
      for (const auto& q : qs) {
        tdsp::QueryResult r =
            with_shortcuts
                ? tdsp::query_with_shortcuts(tree, shortcuts, q.s, q.d, mode, q.t)
                : tdsp::basic_query(tree, q.s, q.d, mode, q.t);
        if (!r.reachable) {
          *os << "UNREACHABLE\n";
          continue;
        }
        if (mode == tdsp::QueryMode::scalar) {
          *os << tdsp::detail::format_double(r.cost);
          if (q_path) {
            for (tdsp::Vertex v : tdsp::reconstruct_path(r)) *os << ' ' << v;
          }
          *os << '\n';
        } else {
          tdsp::detail::write_plf(
              tdsp::PLF::trusted(r.profile.points(), {}, false), *os);
        }
      }
    } else if (*bench) {
      tdsp::TreeDecomposition tree = read_index_file(b_index);
      std::vector<tdsp::ShortcutSet> sets;
      sets.reserve(b_manifests.size());
      for (const auto& path : b_manifests) {
        auto is = open_in(path);
        sets.push_back(tdsp::read_manifest(is));
        if (sets.back().fingerprint != tree.fingerprint())
          throw tdsp::StaleSelection("manifest " + path + " does not match this index");
      }
      auto qis = open_in(b_queries);
      auto qs = tdsp::load_queries(qis, tree.graph());
      std::vector<tdsp::BenchMethod> methods{{"basic", nullptr}};
      for (const auto& s : sets) methods.push_back({method_name(s), &s});
      tdsp::BenchOptions opt;
      opt.mode = b_mode == "profile" ? tdsp::QueryMode::profile : tdsp::QueryMode::scalar;
      opt.repeats = b_repeat;
      opt.threads = b_threads;
      opt.with_oracle = b_oracle;
      tdsp::BenchOutput out = tdsp::run_bench(tree, methods, qs, opt);
      if (b_out.empty()) {
        tdsp::write_bench_records(out.records, std::cout);
      } else {
        auto os = open_out(b_out);
        tdsp::write_bench_records(out.records, os);
      }
      if (b_summary_out.empty()) {
        tdsp::write_bench_summaries(out.summaries, std::cerr);
      } else {
        auto os = open_out(b_summary_out);
        tdsp::write_bench_summaries(out.summaries, os);
      }
    } else if (*update) {
      tdsp::TreeDecomposition tree = read_index_file(u_index);
      tdsp::ShortcutSet manifest;
      {
        auto is = open_in(u_manifest);
        manifest = tdsp::read_manifest(is);
      }
      if (manifest.fingerprint != tree.fingerprint())
        throw tdsp::StaleSelection("manifest does not match this index");
      std::vector<std::tuple<tdsp::Vertex, tdsp::Vertex, tdsp::PLF>> ups;
      {
        auto is = open_in(u_updates);
        ups = tdsp::load_updates(is);
      }
      if (ups.empty()) {
        std::cout << "no updates\n";
        return 0;
      }
      tdsp::CandidateSet cands = tdsp::build_all_candidates(tree);
      for (const auto& [a, b, fn] : ups) tdsp::update_edge(tree, cands, a, b, fn);
      tdsp::SelectionResult sel = manifest.strategy == "dp"
                                      ? tdsp::select_dp(cands, manifest.budget)
                                      : tdsp::select_greedy(cands, manifest.budget);
      // write to a sibling temp file and rename, so an interrupted update
      // never leaves a truncated index or manifest behind
      auto replace_file = [](const std::string& target, auto&& writer) {
        std::string tmp = target + ".tmp";
        {
          auto os = open_out(tmp);
          writer(os);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, target, ec);
        if (ec) throw tdsp::TdspError("cannot replace " + target + ": " + ec.message());
      };
      replace_file(u_out_index.empty() ? u_index : u_out_index,
                   [&](std::ostream& os) { tdsp::write_index(tree, os); });
      replace_file(u_out_manifest.empty() ? u_manifest : u_out_manifest,
                   [&](std::ostream& os) {
                     tdsp::write_manifest(cands, sel, manifest.strategy, os);
                   });
      std::cout << "applied=" << ups.size() << " reselected=" << sel.selected.size()
                << "\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const tdsp::DisconnectedGraph& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tdsp::UnknownEdge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const tdsp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tdsp::FifoViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tdsp::DuplicateEdge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tdsp::StaleSelection& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
