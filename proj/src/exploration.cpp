#include "regulus/exploration.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include "regulus/detail/explore_core.hpp"

namespace regulus {

namespace {

struct TraceVisitor {
  ExplorationTrace* tr;
  bool on_step(const detail::StepEvent& ev) {
    StepRecord r;
    r.e = ev.e;
    r.h = ev.h;
    r.retained = ev.retained ? 1 : 0;
    r.cls = ev.cls;
    r.unseen_m = static_cast<std::uint8_t>(ev.unseen_m);
    r.fresh_reseed = ev.fresh_reseed ? 1 : 0;
    r.active_after = ev.active_after;
    r.fresh_after = ev.fresh_after;
    tr->steps.push_back(r);
    return true;
  }
  bool on_phase(const PhaseStats& ph, bool) {
    tr->phases.push_back(ph);
    return true;
  }
};

template <class Source>
ExplorationTrace run_to_trace(Source src, long long n, int d, double p,
                              const ExploreOptions& opt, RandomStream& rs) {
  ExplorationTrace tr;
  tr.n = n;
  tr.d = d;
  tr.p = p;
  tr.full_graph = opt.stop == StopRule::kFullGraph;
  TraceVisitor vis{&tr};
  detail::Workspace ws;
  auto out = detail::run_exploration(ws, n, d, src, opt, rs, vis);
  tr.start_vertex = out.start_vertex;
  tr.truncated = out.truncated;
  return tr;
}

}  // namespace

const char* hit_class_name(HitClass c) {
  switch (c) {
    case HitClass::kActive:
      return "active";
    case HitClass::kFresh:
      return "fresh";
    case HitClass::kOneShort:
      return "one-short";
    case HitClass::kPartial:
      return "partial";
  }
  return "?";
}

const PhaseStats& ExplorationTrace::phase_one() const {
  if (phases.empty()) throw std::logic_error("trace has no phases");
  return phases.front();
}

ExplorationTrace explore(const Params& params, const ExploreOptions& opt, RandomStream& rs) {
  params.validate();
  return run_to_trace(detail::LazySource{params.p}, params.n, params.d, params.p, opt, rs);
}

ExplorationTrace explore(const Matching& m, const ExploreOptions& opt, RandomStream& rs) {
  if (!m.complete()) throw std::invalid_argument("explore: matching is not complete");
  if (!m.has_mask()) throw std::invalid_argument("explore: matching has no retention mask");
  return run_to_trace(detail::FixedSource{&m}, m.n, m.d, 0.0, opt, rs);
}

long long component_size_of_start(const ExplorationTrace& tr) {
  const PhaseStats& ph = tr.phase_one();
  if (!ph.closed) throw std::invalid_argument("first phase was truncated");
  return ph.component_size();
}

long long max_component_size(const ExplorationTrace& tr) {
  if (!tr.full_graph || tr.truncated)
    throw std::invalid_argument("need a completed full-graph trace");
  long long best = 0;
  for (const auto& ph : tr.phases) best = std::max(best, ph.component_size());
  return best;
}

namespace {

IdentityReport fail_at(long long step, const std::string& what) {
  return {false, what, step};
}

}  // namespace

IdentityReport check_counter_identities(const ExplorationTrace& tr) {
  const int d = tr.d;
  if (tr.phases.empty()) return fail_at(-1, "no phases");

  // Phase boundary bookkeeping must tile the step range.
  long long expect_first = 1;
  for (const auto& ph : tr.phases) {
    if (ph.first_step != expect_first) return fail_at(ph.first_step, "phase does not start where the previous ended");
    expect_first = ph.last_step + 1;
  }
  if (static_cast<long long>(tr.steps.size()) != tr.phases.back().last_step)
    return fail_at(-1, "step records do not match phase extents");

  long long fresh_running = tr.n - 1;  // start vertex consumed before step 1
  std::size_t phase_at = 0;

  for (const auto& ph : tr.phases) {
    long long active = ph.initial_active;
    long long s_ur = 0, s_unr = 0, s_a = 0, s_nf = 0;
    std::vector<long long> n_m(static_cast<std::size_t>(d) + 1, 0);

    for (long long t = ph.first_step; t <= ph.last_step; ++t) {
      const StepRecord& r = tr.steps[static_cast<std::size_t>(t - 1)];

      // Class / multiplicity consistency.
      if (r.cls == HitClass::kActive) {
        if (r.unseen_m != 0) return fail_at(t, "active hit with nonzero unseen count");
      } else {
        int m = r.unseen_m;
        if (m < 1 || m > d) return fail_at(t, "unseen hit with out-of-range multiplicity");
        if (r.cls == HitClass::kFresh && m != d) return fail_at(t, "fresh class with m != d");
        if (r.cls == HitClass::kOneShort && m != d - 1) return fail_at(t, "one-short class with m != d-1");
        if (r.cls == HitClass::kPartial && m > d - 2) return fail_at(t, "partial class with m > d-2");
      }
      if (t > ph.first_step && r.fresh_reseed) return fail_at(t, "reseed flag off phase boundary");

      // Active-set recursion.
      if (r.cls == HitClass::kActive) {
        active -= 2;
        ++s_a;
      } else if (r.retained) {
        active += r.unseen_m - 2;
        ++s_ur;
        ++n_m[r.unseen_m];
      } else {
        active -= 1;
        ++s_unr;
      }
      if (r.cls != HitClass::kActive && r.cls != HitClass::kFresh) ++s_nf;
      if (active < 0) return fail_at(t, "active count went negative");
      if (active != r.active_after) return fail_at(t, "recorded active count disagrees with recursion");

      // Fresh-vertex identity, across reseeds.
      if (r.fresh_reseed) --fresh_running;
      if (r.cls == HitClass::kFresh) --fresh_running;
      if (fresh_running != r.fresh_after) return fail_at(t, "recorded fresh count disagrees with identity");
    }

    if (ph.closed && active != 0) return fail_at(ph.last_step, "closed phase with nonzero active count");
    if (!ph.closed && phase_at + 1 != tr.phases.size())
      return fail_at(ph.last_step, "truncated phase before the last");

    // Counters recomputed from raw records must match the run tallies.
    if (s_ur != ph.sigma_ur || s_unr != ph.sigma_unr || s_a != ph.sigma_a || s_nf != ph.sigma_nf)
      return fail_at(ph.last_step, "per-phase tallies disagree with step records");
    for (int m = 1; m <= d; ++m)
      if (n_m[m] != ph.n_m[m]) return fail_at(ph.last_step, "retained-by-multiplicity tally mismatch");

    long long nm_total = 0, weighted = 0;
    for (int m = 1; m <= d; ++m) {
      nm_total += n_m[m];
      weighted += (m - 2) * n_m[m];
    }
    if (nm_total != s_ur) return fail_at(ph.last_step, "multiplicity tallies do not sum to retained hits");

    // Step-count split.
    if (ph.tau() != s_ur + s_unr + s_a) return fail_at(ph.last_step, "step count does not split by class");

    if (ph.closed) {
      // Stub balance: the active set starts at initial_active and drains to zero.
      if (ph.initial_active - 2 * s_a - s_unr + weighted != 0)
        return fail_at(ph.last_step, "stub balance identity fails");

      // Component-size sandwich.
      long long tau = ph.tau(), k0 = ph.initial_active;
      if (tau + s_a - k0 > (d - 1) * s_ur)
        return fail_at(ph.last_step, "lower sandwich bound fails");
      if ((d - 1) * (s_ur - s_nf) > tau + s_a)
        return fail_at(ph.last_step, "upper sandwich bound fails");
      if (tau - k0 > tau + s_a - k0) return fail_at(ph.last_step, "sandwich chain ordering fails");
    }
    ++phase_at;
  }
  return {};
}

void write_trace_csv(std::ostream& os, const ExplorationTrace& tr) {
  os << "t,e,h,class,retained,m,active,fresh,fresh_reseed\n";
  const int d = tr.d;
  long long t = 1;
  for (const auto& r : tr.steps) {
    os << t << ',' << stub_vertex(r.e, d) << '.' << stub_slot(r.e, d) << ','
       << stub_vertex(r.h, d) << '.' << stub_slot(r.h, d) << ','
       << hit_class_name(r.cls) << ',' << int(r.retained) << ',' << int(r.unseen_m) << ','
       << r.active_after << ',' << r.fresh_after << ',' << int(r.fresh_reseed) << '\n';
    ++t;
  }
}

}  // namespace regulus
