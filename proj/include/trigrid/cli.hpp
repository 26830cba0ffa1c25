/*
Copyright 2026 The trigrid Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trigrid/graph_io.hpp"
#include "trigrid/oracle.hpp"
#include "trigrid/pipeline.hpp"
#include "trigrid/rmat.hpp"

namespace trigrid::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kMismatch = 3, kInternal = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::configuration:
      return kUsage;
    case ErrorKind::io:
    case ErrorKind::malformed_input:
      return kIo;
    default:
      return kInternal;
  }
}

struct InputArgs {
  std::string input;
  std::optional<unsigned> rmat_scale;
  unsigned edge_factor = 16;
  std::uint64_t seed = 1;
  unsigned max_scale = 32;

  void attach(CLI::App& app) {
    app.add_option("--input", input, "Edge-list file (text or TGR1 binary)");
    app.add_option("--rmat-scale", rmat_scale, "Generate an RMAT graph with 2^S vertices instead");
    app.add_option("--edge-factor", edge_factor, "RMAT edges per vertex")->capture_default_str();
    app.add_option("--seed", seed, "RMAT seed")->capture_default_str();
    app.add_option("--max-scale", max_scale, "Largest RMAT scale accepted")->capture_default_str();
  }

  EdgeList load() const {
    if (input.empty() == !rmat_scale.has_value()) {
      fail(ErrorKind::usage, "give exactly one of --input or --rmat-scale");
    }
    if (!input.empty()) return canonicalize(load_graph(input));
    RmatParams p;
    p.scale = *rmat_scale;
    p.edge_factor = edge_factor;
    p.seed = seed;
    p.max_scale = max_scale;
    return generate_rmat(p);
  }
};

struct EngineArgs {
  bool no_direct_hash = false;
  bool no_dcsr = false;
  bool no_prune = false;
  std::string enumeration = "jik";
  unsigned scratch_factor = 2;

  void attach(CLI::App& app) {
    app.add_flag("--no-direct-hash", no_direct_hash, "Always use open-addressing hashing");
    app.add_flag("--no-dcsr", no_dcsr, "Iterate every task row, including empty ones");
    app.add_flag("--no-prune", no_prune, "Disable early exit of backward lookups");
    app.add_option("--enum", enumeration, "Triangle enumeration order")
        ->check(CLI::IsMember({"jik", "ijk"}))
        ->capture_default_str();
    app.add_option("--scratch-factor", scratch_factor, "Hash capacity / longest row (>= 2)")
        ->check(CLI::Range(2u, 64u))
        ->capture_default_str();
  }

  EngineOptions options() const {
    EngineOptions o;
    o.direct_hash = !no_direct_hash;
    o.doubly_sparse = !no_dcsr;
    o.prune = !no_prune;
    o.enumeration = enumeration == "ijk" ? Enumeration::ijk : Enumeration::jik;
    o.scratch_factor = scratch_factor;
    return o;
  }
};

inline void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  f << content;
  if (!f) fail(ErrorKind::io, "cannot write " + path);
}

inline std::string render(const RunReport& r, const std::string& format) {
  return format == "json" ? report_json(r).dump(2) + "\n" : report_text(r);
}

inline std::string options_label(const EngineOptions& o) {
  std::string s = to_string(o.enumeration);
  if (!o.direct_hash) s += ",no-direct-hash";
  if (!o.doubly_sparse) s += ",no-dcsr";
  if (!o.prune) s += ",no-prune";
  return s;
}

/// Entry point for the `trigrid` tool. Output goes to `out`, diagnostics to
/// `err`; the return value is the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed 2-D cyclic triangle counting on simulated ranks", "trigrid"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write an RMAT graph to a file");
  RmatParams gen_params;
  std::string gen_out;
  gen->add_option("--scale", gen_params.scale, "log2 of the vertex count")->required();
  gen->add_option("--edge-factor", gen_params.edge_factor, "Raw edges per vertex")->capture_default_str();
  gen->add_option("--seed", gen_params.seed, "Generator seed")->capture_default_str();
  gen->add_option("--max-scale", gen_params.max_scale, "Largest scale accepted")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (.tgr/.bin for binary, text otherwise)")->required();

  // count
  auto* count = app.add_subcommand("count", "Count triangles and report metrics");
  int count_ranks = 1;
  InputArgs count_in;
  EngineArgs count_eng;
  std::string count_metrics, count_format = "text", count_dump;
  count->add_option("--ranks", count_ranks, "Number of simulated ranks (perfect square)")->required();
  count_in.attach(*count);
  count_eng.attach(*count);
  count->add_option("--metrics", count_metrics, "Write the metrics report here instead of stdout");
  count->add_option("--format", count_format, "Report format")->check(CLI::IsMember({"text", "json"}));
  count->add_option("--dump-blocks", count_dump, "Directory for per-rank block blobs");

  // validate
  auto* validate = app.add_subcommand("validate", "Compare the engine against both oracles");
  std::vector<int> validate_ranks{1};
  InputArgs validate_in;
  EngineArgs validate_eng;
  bool inject_fault = false;
  validate->add_option("--ranks", validate_ranks, "Rank counts to run")->delimiter(',');
  validate_in.attach(*validate);
  validate_eng.attach(*validate);
  validate->add_flag("--inject-fault", inject_fault, "Corrupt one task block (checks mismatch detection)");

  // bench
  auto* bench = app.add_subcommand("bench", "Sweep rank counts and optimization toggles");
  std::vector<int> bench_ranks;
  InputArgs bench_in;
  EngineArgs bench_eng;
  bool sweep_toggles = false;
  std::string bench_format = "text";
  bench->add_option("--ranks", bench_ranks, "Rank counts to run")->delimiter(',')->required();
  bench_in.attach(*bench);
  bench_eng.attach(*bench);
  bench->add_flag("--sweep-toggles", sweep_toggles, "Also run with each optimization disabled");
  bench->add_option("--format", bench_format, "Report format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const EdgeList g = generate_rmat(gen_params);
      save_graph(gen_out, g);
      out << "n=" << g.n << " m=" << g.edges.size() << " raw=" << gen_params.raw_edge_count() << '\n';
      return kOk;
    }

    if (*count) {
      RunConfig cfg;
      cfg.ranks = count_ranks;
      cfg.engine = count_eng.options();
      if (!count_dump.empty()) cfg.dump_blocks = count_dump;
      grid_side_for(cfg.ranks);
      const RunReport r = run_pipeline(count_in.load(), cfg);
      out << r.triangles << '\n';
      write_or_print(count_metrics, render(r, count_format), out);
      return kOk;
    }

    if (*validate) {
      for (int p : validate_ranks) grid_side_for(p);
      const EdgeList g = validate_in.load();
      const std::uint64_t serial = oracle::count_serial(g);
      std::optional<std::uint64_t> matrix;
      if (g.n <= oracle::kMatrixOracleLimit) matrix = oracle::count_matrix(g);
      bool ok = !matrix || *matrix == serial;
      out << "serial=" << serial << '\n';
      out << "matrix=" << (matrix ? std::to_string(*matrix) : std::string("skipped (n > 64)")) << '\n';
      const CsrGraph csr = to_csr(g);
      for (int p : validate_ranks) {
        RunConfig cfg;
        cfg.ranks = p;
        cfg.engine = validate_eng.options();
        cfg.inject_fault = inject_fault;
        const std::uint64_t got = run_pipeline(csr, cfg).triangles;
        const bool match = got == serial;
        ok = ok && match;
        out << "engine[p=" << p << "]=" << got << (match ? " match" : " MISMATCH") << '\n';
      }
      out << "result=" << (ok ? "match" : "mismatch") << '\n';
      if (!ok) err << "triangle counts disagree\n";
      return ok ? kOk : kMismatch;
    }

    if (*bench) {
      for (int p : bench_ranks) grid_side_for(p);
      std::sort(bench_ranks.begin(), bench_ranks.end());
      bench_ranks.erase(std::unique(bench_ranks.begin(), bench_ranks.end()), bench_ranks.end());
      const CsrGraph csr = to_csr(bench_in.load());
      std::vector<EngineOptions> configs{bench_eng.options()};
      if (sweep_toggles) {
        EngineOptions o = configs.front();
        for (auto flip : {&EngineOptions::direct_hash, &EngineOptions::doubly_sparse, &EngineOptions::prune}) {
          EngineOptions v = o;
          v.*flip = !(o.*flip);
          configs.push_back(v);
        }
        EngineOptions e = o;
        e.enumeration = o.enumeration == Enumeration::jik ? Enumeration::ijk : Enumeration::jik;
        configs.push_back(e);
      }
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      std::ostringstream table;
      table << std::left << std::setw(34) << "config" << std::right << std::setw(6) << "ranks" << std::setw(12)
            << "ppt_s" << std::setw(12) << "tct_s" << std::setw(12) << "overall_s" << std::setw(9) << "speedup"
            << std::setw(10) << "expected" << std::setw(14) << "tasks" << std::setw(14) << "probes"
            << std::setw(14) << "triangles" << '\n';
      for (const EngineOptions& o : configs) {
        double base_overall = 0.0;
        for (int p : bench_ranks) {
          RunConfig cfg;
          cfg.ranks = p;
          cfg.engine = o;
          const RunReport r = run_pipeline(csr, cfg);
          const double ppt = r.max_seconds(&RankReport::preprocess_seconds);
          const double tct = r.max_seconds(&RankReport::count_seconds);
          const double overall = ppt + tct;
          if (p == bench_ranks.front()) base_overall = overall;
          const double speedup = overall > 0.0 ? base_overall / overall : 1.0;
          const double expected = static_cast<double>(p) / bench_ranks.front();
          const BlockCount w = r.total_work();
          table << std::left << std::setw(34) << options_label(o) << std::right << std::setw(6) << p << std::fixed
                << std::setprecision(4) << std::setw(12) << ppt << std::setw(12) << tct << std::setw(12) << overall
                << std::setprecision(2) << std::setw(9) << speedup << std::setw(10) << expected << std::setw(14)
                << w.tasks_touched << std::setw(14) << w.probes << std::setw(14) << r.triangles << '\n';
          rows.push_back({{"config", options_label(o)},
                          {"ranks", p},
                          {"ppt_seconds", ppt},
                          {"tct_seconds", tct},
                          {"overall_seconds", overall},
                          {"speedup", speedup},
                          {"expected_speedup", expected},
                          {"tasks_touched", w.tasks_touched},
                          {"probes", w.probes},
                          {"triangles", r.triangles}});
        }
      }
      out << (bench_format == "json" ? rows.dump(2) + "\n" : table.str());
      return kOk;
    }
  } catch (const Error& e) {
    err << "trigrid: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "trigrid: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "trigrid: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace trigrid::cli
