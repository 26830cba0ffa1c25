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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "trigrid/error.hpp"
#include "trigrid/graph.hpp"
#include "trigrid/transport.hpp"

namespace trigrid {

/// max / mean of a set of per-rank (or per-block) quantities.
inline double load_imbalance(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::undefined_metric, "load imbalance of an empty set");
  double sum = 0.0;
  double max = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) fail(ErrorKind::undefined_metric, "load imbalance needs non-negative values");
    sum += v;
    max = std::max(max, v);
  }
  if (sum == 0.0) fail(ErrorKind::undefined_metric, "load imbalance of an all-zero set");
  return max / (sum / static_cast<double>(values.size()));
}

inline double load_imbalance(std::span<const std::uint64_t> values) {
  std::vector<double> as_double(values.begin(), values.end());
  return load_imbalance(std::span<const double>(as_double));
}

/// Percentage increase between successive counts.
inline std::vector<double> task_growth(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) fail(ErrorKind::undefined_metric, "task growth needs at least two counts");
  std::vector<double> out;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i - 1] == 0) fail(ErrorKind::undefined_metric, "task growth from a zero count");
    out.push_back(100.0 * (static_cast<double>(counts[i]) - static_cast<double>(counts[i - 1])) /
                  static_cast<double>(counts[i - 1]));
  }
  return out;
}

/// Nearest whole percent.
inline long round_percent(double percent) { return std::lround(percent); }

struct CostModelInputs {
  double n = 0;
  double m = 0;
  double p = 1;
  double d_avg = 0;
  double d_max = 0;

  static CostModelInputs from(const GraphStats& s, int p) {
    return {static_cast<double>(s.n), static_cast<double>(s.m), static_cast<double>(p), s.d_avg,
            static_cast<double>(s.d_max)};
  }
};

// Abstract time units; constants dropped, log base 2.

/// p + m/p + n/p + log p + d_max + d_max log p
inline double cost_model_pre(const CostModelInputs& in) {
  const double lg = std::log2(in.p);
  return in.p + in.m / in.p + in.n / in.p + lg + in.d_max + in.d_max * lg;
}

/// d_avg * (n / sqrt p) * (d_avg / sqrt p + 1)
inline double cost_model_tc(const CostModelInputs& in) {
  const double root = std::sqrt(in.p);
  return in.d_avg * (in.n / root) * (in.d_avg / root + 1.0);
}

/// Per-rank wall-clock breakdown of one run.
struct PhaseTimings {
  std::vector<double> preprocess_seconds;
  std::vector<double> count_seconds;
  std::vector<double> preprocess_comm_seconds;
  std::vector<double> count_comm_seconds;
  std::vector<std::vector<double>> shift_compute_seconds;  // [rank][shift]
  std::vector<std::vector<double>> shift_wait_seconds;     // [rank][shift]
  std::vector<std::uint64_t> preprocess_bytes;
  std::vector<std::uint64_t> count_bytes;
};

struct CommFraction {
  double preprocess = 0.0;
  double count = 0.0;
};

/// Communication time over total time, per phase, summed over ranks.
inline CommFraction comm_fraction(const PhaseTimings& t) {
  auto fraction = [](const std::vector<double>& comm, const std::vector<double>& total, const char* phase) {
    const double c = std::accumulate(comm.begin(), comm.end(), 0.0);
    const double all = std::accumulate(total.begin(), total.end(), 0.0);
    if (!(all > 0.0)) fail(ErrorKind::undefined_metric, std::string("no time recorded for ") + phase);
    return std::clamp(c / all, 0.0, 1.0);
  };
  return {fraction(t.preprocess_comm_seconds, t.preprocess_seconds, "preprocessing"),
          fraction(t.count_comm_seconds, t.count_seconds, "triangle counting")};
}

/// Per-shift imbalance of compute time (or compute + wait) across ranks.
/// Shifts where no rank recorded any time are reported as NaN.
inline std::vector<double> shift_imbalance(const PhaseTimings& t, bool include_wait) {
  std::vector<double> out;
  if (t.shift_compute_seconds.empty()) return out;
  const std::size_t shifts = t.shift_compute_seconds.front().size();
  for (std::size_t z = 0; z < shifts; ++z) {
    std::vector<double> per_rank;
    for (std::size_t r = 0; r < t.shift_compute_seconds.size(); ++r) {
      double v = t.shift_compute_seconds[r][z];
      if (include_wait) v += t.shift_wait_seconds[r][z];
      per_rank.push_back(v);
    }
    try {
      out.push_back(load_imbalance(std::span<const double>(per_rank)));
    } catch (const Error&) {
      out.push_back(std::nan(""));
    }
  }
  return out;
}

}  // namespace trigrid
