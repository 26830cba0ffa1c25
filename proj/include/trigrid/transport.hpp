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

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "trigrid/bytes.hpp"
#include "trigrid/error.hpp"

namespace trigrid {

/// Side length of the square process grid for p ranks.
inline std::uint32_t grid_side_for(int p) {
  if (p < 1) fail(ErrorKind::configuration, "rank count must be >= 1");
  std::uint32_t s = 0;
  while (static_cast<std::uint64_t>(s + 1) * (s + 1) <= static_cast<std::uint64_t>(p)) ++s;
  if (static_cast<int>(s * s) != p) {
    fail(ErrorKind::configuration, "rank count " + std::to_string(p) + " is not a perfect square");
  }
  return s;
}

inline bool is_perfect_square(int p) {
  try {
    grid_side_for(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Accounting bucket for transport traffic.
enum class Phase : std::uint8_t { setup = 0, preprocess = 1, count = 2 };
inline constexpr std::size_t kPhaseCount = 3;

struct PhaseCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t messages_sent = 0;
  double comm_seconds = 0.0;
};

struct CommCounters {
  std::array<PhaseCounters, kPhaseCount> phases{};

  const PhaseCounters& operator[](Phase ph) const { return phases[static_cast<std::size_t>(ph)]; }
  PhaseCounters& operator[](Phase ph) { return phases[static_cast<std::size_t>(ph)]; }

  std::uint64_t total_bytes() const {
    std::uint64_t t = 0;
    for (const auto& p : phases) t += p.bytes_sent;
    return t;
  }
};

/// Raised in ranks that were blocked when another rank failed.
class RankAborted : public Error {
 public:
  explicit RankAborted(const std::string& why) : Error(ErrorKind::protocol, why) {}
};

namespace detail {

/// Shared state of one SPMD run: a FIFO byte queue per ordered rank pair.
class World {
 public:
  explicit World(int p)
      : p_(p), channels_(static_cast<std::size_t>(p) * p), wake_(p), waiting_on_(p, kRunning), running_(p) {}

  int size() const { return p_; }

  void send(int src, int dst, Bytes payload) {
    std::lock_guard lock(mu_);
    if (aborted_) throw RankAborted(abort_reason_);
    channel(src, dst).push_back(std::move(payload));
    wake_[dst].notify_one();
  }

  Bytes recv(int dst, int src) {
    std::unique_lock lock(mu_);
    auto& q = channel(src, dst);
    while (q.empty()) {
      if (aborted_) throw RankAborted(abort_reason_);
      waiting_on_[dst] = src;
      if (all_blocked()) {
        std::string why = "deadlock: every live rank is blocked in recv (";
        for (int r = 0; r < p_; ++r) {
          if (waiting_on_[r] >= 0) why += std::to_string(r) + "<-" + std::to_string(waiting_on_[r]) + " ";
        }
        why.back() = ')';
        abort_locked(why);
        waiting_on_[dst] = kRunning;
        throw Error(ErrorKind::protocol, why);
      }
      wake_[dst].wait(lock);
      waiting_on_[dst] = kRunning;
    }
    Bytes out = std::move(q.front());
    q.pop_front();
    return out;
  }

  void finish(int rank) {
    std::lock_guard lock(mu_);
    waiting_on_[rank] = kFinished;
    --running_;
    if (running_ > 0 && all_blocked()) abort_locked("deadlock: remaining ranks wait for finished peers");
  }

  void abort(const std::string& why) {
    std::lock_guard lock(mu_);
    abort_locked(why);
  }

  /// Messages never received, as "src->dst (count)" items.
  std::string pending_summary() const {
    std::string out;
    for (int s = 0; s < p_; ++s) {
      for (int d = 0; d < p_; ++d) {
        const auto& q = channels_[static_cast<std::size_t>(s) * p_ + d];
        if (!q.empty()) out += std::to_string(s) + "->" + std::to_string(d) + " (" + std::to_string(q.size()) + ") ";
      }
    }
    if (!out.empty()) out.pop_back();
    return out;
  }

 private:
  static constexpr int kRunning = -1;
  static constexpr int kFinished = -2;

  std::deque<Bytes>& channel(int src, int dst) { return channels_[static_cast<std::size_t>(src) * p_ + dst]; }

  bool all_blocked() const {
    bool any_waiting = false;
    for (int r = 0; r < p_; ++r) {
      const int src = waiting_on_[r];
      if (src == kRunning) return false;
      if (src >= 0) {
        if (!channels_[static_cast<std::size_t>(src) * p_ + r].empty()) return false;
        any_waiting = true;
      }
    }
    return any_waiting;
  }

  void abort_locked(const std::string& why) {
    if (!aborted_) {
      aborted_ = true;
      abort_reason_ = why;
    }
    for (auto& cv : wake_) cv.notify_all();
  }

  int p_;
  mutable std::mutex mu_;
  std::vector<std::deque<Bytes>> channels_;
  std::vector<std::condition_variable> wake_;
  std::vector<int> waiting_on_;
  int running_;
  bool aborted_ = false;
  std::string abort_reason_;
};

}  // namespace detail

/// One rank's endpoint. Not shareable across threads.
///
/// Collectives are built from point-to-point messages: reductions gather to
/// rank 0 and broadcast the result, all-to-all exchanges run p - 1 staggered
/// steps (destination (rank + step) mod p).
class Comm {
 public:
  Comm(detail::World& world, int rank) : world_(&world), rank_(rank) {}

  Comm(const Comm&) = delete;
  Comm& operator=(const Comm&) = delete;

  int rank() const { return rank_; }
  int size() const { return world_->size(); }

  Phase phase() const { return phase_; }
  void set_phase(Phase ph) { phase_ = ph; }
  const CommCounters& counters() const { return counters_; }

  void send_bytes(int dest, Bytes payload) {
    Timed t(*this);
    raw_send(dest, std::move(payload));
  }

  Bytes recv_bytes(int src) {
    Timed t(*this);
    return raw_recv(src);
  }

  std::uint64_t allreduce_sum_u64(std::uint64_t local) {
    Timed t(*this);
    return reduce_scalar(local, [](std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
      return !__builtin_add_overflow(a, b, &out);
    });
  }

  std::uint64_t allreduce_max_u64(std::uint64_t local) {
    Timed t(*this);
    return reduce_scalar(local, [](std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
      out = a > b ? a : b;
      return true;
    });
  }

  void barrier() { allreduce_sum_u64(0); }

  /// Elementwise sum over all ranks.
  std::vector<std::uint64_t> allreduce_sum_vec(std::span<const std::uint64_t> local) {
    Timed t(*this);
    return vector_collective(local, /*exclusive=*/false);
  }

  /// Rank r receives the elementwise sum of the vectors of ranks 0..r-1.
  std::vector<std::uint64_t> exscan_sum_vec(std::span<const std::uint64_t> local) {
    Timed t(*this);
    return vector_collective(local, /*exclusive=*/true);
  }

  /// incoming[j] on rank i is outgoing[i] of rank j.
  std::vector<Bytes> alltoallv_bytes(std::vector<Bytes> outgoing) {
    Timed t(*this);
    const int p = size();
    if (static_cast<int>(outgoing.size()) != p) {
      fail(ErrorKind::protocol, "alltoallv needs one buffer per rank, got " + std::to_string(outgoing.size()));
    }
    std::vector<Bytes> incoming(p);
    incoming[rank_] = std::move(outgoing[rank_]);
    for (int step = 1; step < p; ++step) {
      const int dest = (rank_ + step) % p;
      raw_send(dest, std::move(outgoing[dest]));
    }
    for (int step = 1; step < p; ++step) {
      const int src = (rank_ - step + p) % p;
      incoming[src] = raw_recv(src);
    }
    return incoming;
  }

 private:
  // Only the outermost transport call is timed so collectives are not
  // double counted.
  class Timed {
   public:
    explicit Timed(Comm& c) : c_(c), start_(std::chrono::steady_clock::now()) { ++c_.depth_; }
    ~Timed() {
      if (--c_.depth_ == 0) {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
        c_.counters_[c_.phase_].comm_seconds += d.count();
      }
    }
    Timed(const Timed&) = delete;
    Timed& operator=(const Timed&) = delete;

   private:
    Comm& c_;
    std::chrono::steady_clock::time_point start_;
  };

  void check_peer(int peer) const {
    if (peer < 0 || peer >= size()) fail(ErrorKind::usage, "peer rank " + std::to_string(peer) + " out of range");
    if (peer == rank_) fail(ErrorKind::usage, "rank " + std::to_string(rank_) + " cannot message itself");
  }

  void raw_send(int dest, Bytes payload) {
    check_peer(dest);
    auto& c = counters_[phase_];
    c.bytes_sent += payload.size();
    ++c.messages_sent;
    world_->send(rank_, dest, std::move(payload));
  }

  Bytes raw_recv(int src) {
    check_peer(src);
    return world_->recv(rank_, src);
  }

  // Root replies carry a status word first: 0 ok, 1 overflow, 2 length mismatch.
  template <class Combine>
  std::uint64_t reduce_scalar(std::uint64_t local, Combine combine) {
    const int p = size();
    if (p == 1) return local;
    if (rank_ != 0) {
      raw_send(0, encode_u64s(std::array{local}));
      return unpack_status(decode_u64s(raw_recv(0)))[0];
    }
    std::uint64_t acc = local;
    bool ok = true;
    for (int r = 1; r < p; ++r) {
      const auto v = decode_u64s(raw_recv(r));
      if (v.size() != 1) fail(ErrorKind::protocol, "malformed reduction message");
      ok = ok && combine(acc, v[0], acc);
    }
    const std::array<std::uint64_t, 2> reply{ok ? 0u : 1u, acc};
    for (int r = 1; r < p; ++r) raw_send(r, encode_u64s(reply));
    return unpack_status(std::vector<std::uint64_t>(reply.begin(), reply.end()))[0];
  }

  std::vector<std::uint64_t> vector_collective(std::span<const std::uint64_t> local, bool exclusive) {
    const int p = size();
    if (p == 1) return exclusive ? std::vector<std::uint64_t>(local.size(), 0)
                                 : std::vector<std::uint64_t>(local.begin(), local.end());
    if (rank_ != 0) {
      raw_send(0, encode_u64s(local));
      return unpack_status(decode_u64s(raw_recv(0)));
    }
    std::vector<std::vector<std::uint64_t>> all(p);
    all[0].assign(local.begin(), local.end());
    std::uint64_t status = 0;
    for (int r = 1; r < p; ++r) {
      all[r] = decode_u64s(raw_recv(r));
      if (all[r].size() != local.size()) status = 2;
    }
    std::vector<std::vector<std::uint64_t>> replies(p);
    if (status == 0) {
      std::vector<std::uint64_t> running(local.size(), 0);
      for (int r = 0; r < p && status == 0; ++r) {
        if (exclusive) replies[r] = running;
        for (std::size_t i = 0; i < running.size(); ++i) {
          if (__builtin_add_overflow(running[i], all[r][i], &running[i])) status = 1;
        }
      }
      if (!exclusive) replies.assign(p, running);
    }
    for (int r = 0; r < p; ++r) {
      std::vector<std::uint64_t> msg{status};
      if (status == 0) msg.insert(msg.end(), replies[r].begin(), replies[r].end());
      if (r == 0) {
        replies[0] = std::move(msg);
      } else {
        raw_send(r, encode_u64s(msg));
      }
    }
    return unpack_status(std::move(replies[0]));
  }

  static std::vector<std::uint64_t> unpack_status(std::vector<std::uint64_t> msg) {
    if (msg.empty()) fail(ErrorKind::protocol, "empty collective reply");
    if (msg[0] == 1) fail(ErrorKind::overflow, "64-bit reduction overflow");
    if (msg[0] == 2) fail(ErrorKind::protocol, "collective vector length mismatch across ranks");
    msg.erase(msg.begin());
    return msg;
  }

  detail::World* world_;
  int rank_;
  Phase phase_ = Phase::setup;
  int depth_ = 0;
  CommCounters counters_;
};

template <class R>
struct SpmdOutcome {
  std::vector<R> results;
  std::vector<CommCounters> counters;
};

/// Runs `program(Comm&)` on p logical ranks, one thread each, and collects
/// every rank's return value. A failure on any rank aborts the others and is
/// rethrown here; messages left unreceived at the end are a protocol error.
template <class Program>
auto spmd_execute(int p, Program&& program, bool require_square = false)
    -> SpmdOutcome<std::invoke_result_t<Program&, Comm&>> {
  using R = std::invoke_result_t<Program&, Comm&>;
  static_assert(!std::is_void_v<R>, "rank programs must return a value");
  if (p < 1) fail(ErrorKind::configuration, "rank count must be >= 1");
  if (require_square) grid_side_for(p);

  detail::World world(p);
  std::vector<std::optional<R>> results(p);
  std::vector<CommCounters> counters(p);
  std::mutex err_mu;
  std::exception_ptr primary;
  std::exception_ptr collateral;

  auto body = [&](int rank) {
    Comm comm(world, rank);
    try {
      results[rank].emplace(program(comm));
      counters[rank] = comm.counters();
      world.finish(rank);
    } catch (const RankAborted&) {
      std::lock_guard lock(err_mu);
      if (!collateral) collateral = std::current_exception();
      world.finish(rank);
    } catch (...) {
      {
        std::lock_guard lock(err_mu);
        if (!primary) primary = std::current_exception();
      }
      world.abort("rank " + std::to_string(rank) + " failed");
      world.finish(rank);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(p);
  for (int r = 0; r < p; ++r) threads.emplace_back(body, r);
  for (auto& t : threads) t.join();

  if (primary) std::rethrow_exception(primary);
  if (collateral) std::rethrow_exception(collateral);
  if (auto pending = world.pending_summary(); !pending.empty()) {
    fail(ErrorKind::protocol, "unmatched messages at shutdown: " + pending);
  }
  SpmdOutcome<R> out;
  out.results.reserve(p);
  for (auto& r : results) out.results.push_back(std::move(*r));
  out.counters = std::move(counters);
  return out;
}

template <class Program>
auto spmd_run(int p, Program&& program, bool require_square = false) {
  return spmd_execute(p, std::forward<Program>(program), require_square).results;
}

}  // namespace trigrid
