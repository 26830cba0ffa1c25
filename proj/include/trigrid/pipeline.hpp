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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trigrid/engine.hpp"
#include "trigrid/graph.hpp"
#include "trigrid/metrics.hpp"
#include "trigrid/preprocess.hpp"
#include "trigrid/transport.hpp"

namespace trigrid {

struct RunConfig {
  int ranks = 1;
  EngineOptions engine;
  /// Test hook: rank 0 drops the first entry of its task block.
  bool inject_fault = false;
  /// When set, every rank writes its home blocks there as blob files.
  std::optional<std::filesystem::path> dump_blocks;
};

struct RankReport {
  int rank = 0;
  GridCoord coord;
  double preprocess_seconds = 0.0;
  double count_seconds = 0.0;
  PreprocessStats pre;
  std::uint64_t upper_nnz = 0;
  std::uint64_t lower_nnz = 0;
  std::uint64_t task_nnz = 0;
  DistributedCount count;
  CommCounters comm;
};

struct RunReport {
  std::uint64_t triangles = 0;
  int ranks = 1;
  std::uint32_t grid_side = 1;
  EngineOptions engine;
  GraphStats stats;
  std::vector<RankReport> per_rank;

  BlockCount total_work() const {
    BlockCount t;
    for (const auto& r : per_rank) {
      for (const auto& s : r.count.shifts) t += s.work;
    }
    return t;
  }

  std::vector<std::uint64_t> task_counts() const {
    std::vector<std::uint64_t> out;
    for (const auto& r : per_rank) out.push_back(r.task_nnz);
    return out;
  }

  std::uint64_t bytes(Phase ph) const {
    std::uint64_t t = 0;
    for (const auto& r : per_rank) t += r.comm[ph].bytes_sent;
    return t;
  }

  std::uint64_t messages(Phase ph) const {
    std::uint64_t t = 0;
    for (const auto& r : per_rank) t += r.comm[ph].messages_sent;
    return t;
  }

  double max_seconds(double RankReport::*field) const {
    double m = 0.0;
    for (const auto& r : per_rank) m = std::max(m, r.*field);
    return m;
  }

  PhaseTimings timings() const {
    PhaseTimings t;
    for (const auto& r : per_rank) {
      t.preprocess_seconds.push_back(r.preprocess_seconds);
      t.count_seconds.push_back(r.count_seconds);
      t.preprocess_comm_seconds.push_back(r.comm[Phase::preprocess].comm_seconds);
      t.count_comm_seconds.push_back(r.comm[Phase::count].comm_seconds);
      t.preprocess_bytes.push_back(r.comm[Phase::preprocess].bytes_sent);
      t.count_bytes.push_back(r.comm[Phase::count].bytes_sent);
      std::vector<double> compute, wait;
      for (const auto& s : r.count.shifts) {
        compute.push_back(s.compute_seconds);
        wait.push_back(s.wait_seconds);
      }
      t.shift_compute_seconds.push_back(std::move(compute));
      t.shift_wait_seconds.push_back(std::move(wait));
    }
    return t;
  }
};

inline void drop_first_entry(DcsrBlock& b) {
  if (b.empty()) return;
  auto entries = block_entries(b);
  entries.erase(entries.begin());
  b = make_block(b.grid_side, b.coord, b.orientation, b.n, std::move(entries));
}

inline void dump_block(const std::filesystem::path& dir, const std::string& name, const DcsrBlock& b) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  const Bytes data = blob_encode(b);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorKind::io, "cannot write " + (dir / name).string());
}

/// Preprocessing and counting on p simulated ranks. Every rank starts from
/// its 1-D block of `g`.
inline RunReport run_pipeline(const CsrGraph& g, const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const std::uint32_t s = grid_side_for(cfg.ranks);
  if (cfg.dump_blocks) std::filesystem::create_directories(*cfg.dump_blocks);

  auto program = [&](Comm& h) {
    RankReport rep;
    rep.rank = h.rank();
    rep.coord = coord_of_rank(h.rank(), s);

    h.set_phase(Phase::preprocess);
    const auto t0 = Clock::now();
    RankBlocks blocks = preprocess(h, block_slice(g, h.rank(), h.size()), s, &rep.pre);
    h.barrier();
    const auto t1 = Clock::now();
    rep.preprocess_seconds = std::chrono::duration<double>(t1 - t0).count();

    if (cfg.inject_fault && h.rank() == 0) {
      drop_first_entry(cfg.engine.enumeration == Enumeration::jik ? blocks.tasks : blocks.upper);
    }
    if (cfg.dump_blocks) {
      const std::string stem = "rank" + std::to_string(h.rank());
      dump_block(*cfg.dump_blocks, stem + ".upper.blob", blocks.upper);
      dump_block(*cfg.dump_blocks, stem + ".lower.blob", blocks.lower);
      dump_block(*cfg.dump_blocks, stem + ".tasks.blob", blocks.tasks);
    }
    rep.upper_nnz = blocks.upper.nnz();
    rep.lower_nnz = blocks.lower.nnz();

    h.set_phase(Phase::count);
    rep.count = count_triangles_distributed(h, blocks, cfg.engine);
    rep.task_nnz = rep.count.task_nnz;
    rep.count_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
    return rep;
  };

  auto outcome = spmd_execute(cfg.ranks, program, /*require_square=*/true);
  RunReport report;
  report.ranks = cfg.ranks;
  report.grid_side = s;
  report.engine = cfg.engine;
  report.stats = compute_stats(g);
  report.per_rank = std::move(outcome.results);
  for (std::size_t r = 0; r < report.per_rank.size(); ++r) report.per_rank[r].comm = outcome.counters[r];
  report.triangles = report.per_rank.front().count.global_count;
  return report;
}

inline RunReport run_pipeline(const EdgeList& g, const RunConfig& cfg) { return run_pipeline(to_csr(g), cfg); }

/// Summary of a run as an ordered JSON object. Counters are deterministic;
/// times are wall-clock.
inline nlohmann::ordered_json report_json(const RunReport& r) {
  using nlohmann::ordered_json;
  const BlockCount work = r.total_work();
  const auto tasks = r.task_counts();
  const PhaseTimings t = r.timings();
  const CostModelInputs cost = CostModelInputs::from(r.stats, r.ranks);

  auto maybe = [](double v) -> ordered_json { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  auto series = [&](const std::vector<double>& xs) {
    ordered_json a = ordered_json::array();
    for (double x : xs) a.push_back(maybe(x));
    return a;
  };

  ordered_json j;
  j["triangles"] = r.triangles;
  j["ranks"] = r.ranks;
  j["grid_side"] = r.grid_side;
  j["options"] = {{"enumeration", to_string(r.engine.enumeration)},
                  {"direct_hash", r.engine.direct_hash},
                  {"doubly_sparse", r.engine.doubly_sparse},
                  {"prune", r.engine.prune},
                  {"scratch_factor", r.engine.scratch_factor}};
  j["graph"] = {{"n", r.stats.n}, {"m", r.stats.m}, {"d_avg", r.stats.d_avg}, {"d_max", r.stats.d_max}};
  std::uint64_t task_total = 0;
  for (auto c : tasks) task_total += c;
  double task_imb = std::nan("");
  try {
    task_imb = load_imbalance(std::span<const std::uint64_t>(tasks));
  } catch (const Error&) {
  }
  j["counters"] = {{"task_total", task_total},
                   {"tasks_touched", work.tasks_touched},
                   {"probes", work.probes},
                   {"rows_visited", work.rows_visited},
                   {"direct_builds", work.direct_builds},
                   {"open_builds", work.open_builds},
                   {"collisions", work.collisions},
                   {"remote_queries",
                    [&] {
                      std::uint64_t q = 0;
                      for (const auto& pr : r.per_rank) q += pr.pre.remote_queries;
                      return q;
                    }()},
                   {"bytes_preprocess", r.bytes(Phase::preprocess)},
                   {"bytes_count", r.bytes(Phase::count)},
                   {"messages_preprocess", r.messages(Phase::preprocess)},
                   {"messages_count", r.messages(Phase::count)}};
  j["task_imbalance"] = maybe(task_imb);
  CommFraction frac{std::nan(""), std::nan("")};
  try {
    frac = comm_fraction(t);
  } catch (const Error&) {
  }
  j["times"] = {{"preprocess_max_seconds", r.max_seconds(&RankReport::preprocess_seconds)},
                {"count_max_seconds", r.max_seconds(&RankReport::count_seconds)},
                {"preprocess_comm_fraction", maybe(frac.preprocess)},
                {"count_comm_fraction", maybe(frac.count)},
                {"shift_imbalance_compute", series(shift_imbalance(t, false))},
                {"shift_imbalance_with_wait", series(shift_imbalance(t, true))}};
  j["cost_model"] = {{"preprocess", cost_model_pre(cost)}, {"count", cost_model_tc(cost)}};
  return j;
}

/// Flattens the JSON summary into "key=value" lines (nested keys joined by '.').
inline std::string report_text(const RunReport& r) {
  std::ostringstream out;
  auto emit = [&](auto&& self, const std::string& prefix, const nlohmann::ordered_json& node) -> void {
    if (node.is_object()) {
      for (auto it = node.begin(); it != node.end(); ++it) {
        self(self, prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
      }
    } else {
      out << prefix << '=' << (node.is_string() ? node.get<std::string>() : node.dump()) << '\n';
    }
  };
  emit(emit, "", report_json(r));
  return out.str();
}

}  // namespace trigrid
