#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "regulus/exploration.hpp"
#include "regulus/matching.hpp"
#include "regulus/random.hpp"

// Template engine shared by the trace recorder, the tail estimator and the
// concentration audits. Visitors see every step through a single code path,
// so the statistics they accumulate come from the same process definition.

namespace regulus::detail {

inline constexpr std::uint8_t kUnseen = 0;
inline constexpr std::uint8_t kActive = 1;
inline constexpr std::uint8_t kExplored = 2;

struct StepEvent {
  long long t = 0;  // 1-based
  Stub e = 0;
  Stub h = 0;
  bool retained = false;
  HitClass cls = HitClass::kActive;
  int unseen_m = 0;
  bool phase_first = false;
  bool fresh_reseed = false;
  long long active_after = 0;
  long long fresh_after = 0;
  const long long* vcnt = nullptr;  // counts of vertices by unseen stubs, [0..d]
  int phase_index = 0;
};

// Reusable buffers; reset() is the only per-trial allocation-free init.
struct Workspace {
  std::vector<std::uint8_t> status;
  std::vector<Stub> pool;
  std::vector<std::uint32_t> pos;
  std::vector<Stub> queue;
  std::size_t qhead = 0;
  std::vector<std::uint8_t> unseen_cnt;
  std::vector<long long> vcnt;

  void reset(long long n, int d) {
    const std::size_t ns = static_cast<std::size_t>(n) * d;
    status.assign(ns, kUnseen);
    pool.resize(ns);
    pos.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      pool[i] = static_cast<Stub>(i);
      pos[i] = static_cast<std::uint32_t>(i);
    }
    queue.clear();
    qhead = 0;
    unseen_cnt.assign(static_cast<std::size_t>(n), static_cast<std::uint8_t>(d));
    vcnt.assign(static_cast<std::size_t>(d) + 1, 0);
    vcnt[d] = n;
  }

  void pool_remove(Stub s) {
    std::uint32_t i = pos[s];
    Stub last = pool.back();
    pool[i] = last;
    pos[last] = i;
    pool.pop_back();
  }
};

struct LazySource {
  static constexpr bool kLazy = true;
  double p = 0.0;
};

struct FixedSource {
  static constexpr bool kLazy = false;
  const Matching* m = nullptr;
};

struct RunOutcome {
  long long start_vertex = 0;
  long long steps = 0;
  bool truncated = false;
};

// Visitor contract:
//   bool on_step(const StepEvent&)            false stops the run
//   bool on_phase(const PhaseStats&, bool more) false stops the run
template <class Source, class Visitor>
RunOutcome run_exploration(Workspace& ws, long long n, int d, Source src,
                           const ExploreOptions& opt, RandomStream& rs, Visitor&& vis) {
  ws.reset(n, d);
  const long long cap = opt.step_cap ? *opt.step_cap : -1;
  if (cap == 0) throw std::invalid_argument("step cap must be at least 1");

  RunOutcome out;
  long long s0 = opt.start ? *opt.start : static_cast<long long>(rs.below(n));
  if (s0 < 0 || s0 >= n) throw std::invalid_argument("start vertex out of range");
  out.start_vertex = s0;

  long long active = 0;
  auto activate_vertex = [&](long long v) -> int {
    int k = ws.unseen_cnt[v];
    for (int i = 0; i < d; ++i) {
      Stub s = static_cast<Stub>(v * d + i);
      if (ws.status[s] == kUnseen) {
        ws.status[s] = kActive;
        ws.queue.push_back(s);
      }
    }
    --ws.vcnt[k];
    ++ws.vcnt[0];
    ws.unseen_cnt[v] = 0;
    active += k;
    return k;
  };

  int phase_index = 0;
  PhaseStats ph;
  auto open_phase = [&](long long root, long long first_step) {
    ph = PhaseStats{};
    ph.root_vertex = root;
    ph.first_step = first_step;
    ph.n_m.assign(static_cast<std::size_t>(d) + 1, 0);
    ph.fresh_root = ws.unseen_cnt[root] == d;
    ph.initial_active = activate_vertex(root);
  };
  open_phase(s0, 1);
  bool pending_fresh_reseed = false;
  bool pending_phase_first = true;

  for (long long t = 1;; ++t) {
    if (cap > 0 && t > cap) {
      ph.last_step = t - 1;
      ph.closed = false;
      out.steps = t - 1;
      out.truncated = true;
      vis.on_phase(ph, false);
      return out;
    }

    Stub e;
    if (opt.policy == ActivePolicy::kFifo) {
      while (ws.status[ws.queue[ws.qhead]] != kActive) ++ws.qhead;
      e = ws.queue[ws.qhead++];
    } else {
      while (ws.status[ws.queue.back()] != kActive) ws.queue.pop_back();
      e = ws.queue.back();
      ws.queue.pop_back();
    }
    ws.status[e] = kExplored;
    ws.pool_remove(e);
    --active;

    Stub h;
    bool retained;
    if constexpr (Source::kLazy) {
      h = ws.pool[rs.below(ws.pool.size())];
      retained = rs.bernoulli(src.p);
    } else {
      h = src.m->partner[e];
      retained = src.m->retained[h] != 0;
    }
    ws.pool_remove(h);

    HitClass cls;
    int m = 0;
    if (ws.status[h] == kActive) {
      cls = HitClass::kActive;
      ws.status[h] = kExplored;
      --active;
      ++ph.sigma_a;
    } else {
      long long v = static_cast<long long>(h) / d;
      m = ws.unseen_cnt[v];
      ws.status[h] = kExplored;
      cls = m == d ? HitClass::kFresh
                   : (m == d - 1 ? HitClass::kOneShort : HitClass::kPartial);
      if (m < d) ++ph.sigma_nf;
      if (retained) {
        --ws.vcnt[m];
        ++ws.vcnt[0];
        ws.unseen_cnt[v] = 0;
        for (int i = 0; i < d; ++i) {
          Stub s = static_cast<Stub>(v * d + i);
          if (ws.status[s] == kUnseen) {
            ws.status[s] = kActive;
            ws.queue.push_back(s);
          }
        }
        active += m - 1;
        ++ph.sigma_ur;
        ++ph.n_m[m];
      } else {
        --ws.vcnt[m];
        ++ws.vcnt[m - 1];
        ws.unseen_cnt[v] = static_cast<std::uint8_t>(m - 1);
        ++ph.sigma_unr;
      }
    }

    StepEvent ev;
    ev.t = t;
    ev.e = e;
    ev.h = h;
    ev.retained = retained;
    ev.cls = cls;
    ev.unseen_m = m;
    ev.phase_first = pending_phase_first;
    ev.fresh_reseed = pending_fresh_reseed;
    ev.active_after = active;
    ev.fresh_after = ws.vcnt[d];
    ev.vcnt = ws.vcnt.data();
    ev.phase_index = phase_index;
    pending_phase_first = false;
    pending_fresh_reseed = false;

    if (!vis.on_step(ev)) {
      ph.last_step = t;
      ph.closed = active == 0;
      out.steps = t;
      out.truncated = true;
      vis.on_phase(ph, false);
      return out;
    }

    if (active == 0) {
      ph.last_step = t;
      ph.closed = true;
      bool complete = opt.stop == StopRule::kFirstComponent || ws.pool.empty();
      bool capped = !complete && cap > 0 && t >= cap;
      bool more = !complete && !capped;
      bool cont = vis.on_phase(ph, more);
      if (!more || !cont) {
        out.steps = t;
        out.truncated = capped || (more && !cont);
        return out;
      }
      ws.queue.clear();
      ws.qhead = 0;
      Stub r = ws.pool[rs.below(ws.pool.size())];
      ++phase_index;
      open_phase(static_cast<long long>(r) / d, t + 1);
      pending_fresh_reseed = ph.fresh_root;
      pending_phase_first = true;
    }
  }
}

}  // namespace regulus::detail
