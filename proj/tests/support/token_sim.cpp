// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "token_sim.hpp"

#include <deque>
#include <queue>
#include <cmath>
#include <stdexcept>

#include "deskip/hwmodel.hpp"
#include "deskip/rng.hpp"

namespace deskip::testing {

namespace {

enum class State { Idle, Busy, Blocked };

struct Stage {
  State state = State::Idle;
  std::uint64_t frame = 0;
  std::uint64_t done_at = 0;
};

struct Event {
  std::uint64_t time;
  std::size_t stage;
  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : stage > o.stage;
  }
};

}  // namespace

SimResult simulate(const SimPipeline& p, std::size_t warmup, std::size_t measure) {
  const std::size_t m = p.service.size();
  if (m == 0) throw std::invalid_argument("simulate: empty pipeline");
  if (measure < 2) throw std::invalid_argument("simulate: measure must be >= 2");
  if (p.skip && (p.skip->fork >= p.skip->join || p.skip->join >= m || p.skip->slots == 0)) {
    throw std::invalid_argument("simulate: bad skip edge");
  }

  std::vector<Stage> stages(m);
  // fifo[i] feeds stage i + 1
  std::vector<std::deque<std::uint64_t>> fifo(m > 0 ? m - 1 : 0);
  std::size_t slots_free = p.skip ? p.skip->slots : 0;
  std::uint64_t next_source_frame = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

  std::uint64_t now = 0;
  std::size_t completed = 0;
  const std::size_t target = warmup + measure;
  std::vector<std::uint64_t> completion_times;
  completion_times.reserve(target);

  auto try_start = [&](std::size_t i) -> bool {
    Stage& s = stages[i];
    if (s.state != State::Idle) return false;
    const bool from_source = i == 0;
    if (!from_source && fifo[i - 1].empty()) return false;
    if (p.skip && i == p.skip->fork) {
      if (slots_free == 0) return false;
      --slots_free;
    }
    if (from_source) {
      s.frame = next_source_frame++;
    } else {
      s.frame = fifo[i - 1].front();
      fifo[i - 1].pop_front();
    }
    s.state = State::Busy;
    s.done_at = now + p.service[i];
    events.push({s.done_at, i});
    return true;
  };

  auto try_release = [&](std::size_t i) -> bool {
    Stage& s = stages[i];
    if (s.state != State::Blocked) return false;
    if (i + 1 == m) {
      completion_times.push_back(now);
      ++completed;
    } else {
      if (fifo[i].size() >= p.fifo_frames) {
        // zero-capacity FIFO: hand over directly when the consumer is idle
        if (!(p.fifo_frames == 0 && fifo[i].empty() && stages[i + 1].state == State::Idle)) {
          return false;
        }
      }
      fifo[i].push_back(s.frame);
    }
    s.state = State::Idle;
    return true;
  };

  while (completed < target) {
    // settle everything possible at the current instant
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = m; k-- > 0;) changed |= try_release(k);
      for (std::size_t k = 0; k < m; ++k) changed |= try_start(k);
      // a zero-capacity handoff leaves one frame parked until its consumer starts
    }
    if (completed >= target) break;
    if (events.empty()) throw std::logic_error("simulate: deadlock");
    now = events.top().time;
    // completions first, then the settle loop above handles starts
    while (!events.empty() && events.top().time == now) {
      const std::size_t i = events.top().stage;
      events.pop();
      Stage& s = stages[i];
      s.state = State::Blocked;
      if (p.skip && i == p.skip->join) ++slots_free;
    }
  }

  SimResult r;
  r.first_cycle = completion_times[warmup];
  r.last_cycle = completion_times[target - 1];
  r.frames = measure;
  r.frames_per_cycle = static_cast<double>(measure - 1) /
                       static_cast<double>(r.last_cycle - r.first_cycle);
  return r;
}

SweepResult sweep_random_pipelines(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  const std::uint64_t pes[] = {1, 2, 4, 8};
  const std::uint64_t simds[] = {1, 2, 3, 4, 6, 8, 9, 12, 18, 24, 36, 72};
  SweepResult out;
  for (std::size_t trial = 0; trial < count; ++trial) {
    hw::HwConfig cfg;
    cfg.clock_hz = 1.0;
    cfg.join_overhead_cycles_per_row = rng.below(3) == 0 ? 0 : rng.below(120);
    hw::BlockPipeline p;
    const std::size_t m = 1 + rng.below(6);
    for (std::size_t i = 0; i < m; ++i) {
      hw::StageSpec s;
      s.name = "s" + std::to_string(i);
      s.in_channels = s.out_channels = 8;
      s.height = s.width = 2;
      s.pe = pes[rng.below(4)];
      s.simd = simds[rng.below(12)];
      p.stages.push_back(s);
    }
    if (m >= 2 && rng.below(5) != 0) {
      const std::size_t fork = rng.below(m - 1);
      const std::size_t join = fork + 1 + rng.below(m - 1 - fork);
      p.skip = hw::SkipEdge{fork, join};
    }
    for (auto mode : {hw::SkipMode::Stall, hw::SkipMode::Buffer}) {
      SimPipeline sp;
      sp.service = hw::service_cycles(p, cfg);
      if (p.skip) {
        sp.skip = SimSkip{p.skip->fork, p.skip->join,
                          mode == hw::SkipMode::Stall
                              ? std::size_t{1}
                              : std::size_t(hw::skip_depth_frames(*p.skip))};
      }
      const double sim = simulate(sp).frames_per_cycle;
      const double model = hw::block_throughput(p, cfg, mode);
      const double err = std::abs(model / sim - 1.0);
      if (err >= out.worst_rel_err) {
        out.worst_rel_err = err;
        out.worst = "trial " + std::to_string(trial) + ", " + std::to_string(m) +
                    " stages, mode " + hw::to_string(mode) + ": model " +
                    std::to_string(model) + " vs sim " + std::to_string(sim);
      }
      ++out.checked;
    }
  }
  return out;
}

}  // namespace deskip::testing
