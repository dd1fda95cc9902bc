#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "regulus/matching.hpp"
#include "regulus/params.hpp"
#include "regulus/random.hpp"

namespace regulus {

// One stub-pairing step. At step t an active stub e is chosen by policy and
// paired with h, uniform over the remaining unexplored stubs; the edge is
// retained with probability p. Classification is by the state of h's vertex
// at pairing time: m counts its unseen stubs (h included).
enum class HitClass : std::uint8_t {
  kActive,    // h was already active (m = 0 by the structure of the process)
  kFresh,     // h unseen, all d stubs of its vertex unseen
  kOneShort,  // h unseen, exactly d-1 unseen stubs at its vertex
  kPartial,   // h unseen, at most d-2 unseen stubs at its vertex
};

const char* hit_class_name(HitClass c);

struct StepRecord {
  Stub e = 0;
  Stub h = 0;
  std::uint8_t retained = 0;
  HitClass cls = HitClass::kActive;
  std::uint8_t unseen_m = 0;      // 0 on active hits
  std::uint8_t fresh_reseed = 0;  // the phase opened by this step consumed a fresh vertex
  std::int64_t active_after = 0;
  std::int64_t fresh_after = 0;   // vertices with all d stubs unseen
};

// Per-phase tallies. A phase starts at a root vertex (the start vertex, or a
// reseed draw) and ends when the active set empties. For the first phase the
// classical notation is: tau = last_step, sigma_ur + 1 = |C(start)|.
struct PhaseStats {
  long long root_vertex = 0;
  long long first_step = 0;  // 1-based, inclusive
  long long last_step = 0;
  int initial_active = 0;    // d for the first phase; the reseed vertex's unseen count after
  long long sigma_ur = 0;    // unseen hits, retained
  long long sigma_unr = 0;   // unseen hits, not retained
  long long sigma_a = 0;     // active hits
  long long sigma_nf = 0;    // unseen hits at vertices with 1..d-1 unseen stubs
  std::vector<long long> n_m;  // n_m[m], m in [1, d]: retained unseen hits by unseen count
  bool fresh_root = false;     // root had all d stubs unseen when activated
  bool closed = false;         // active set reached zero (not a truncation)

  long long tau() const { return last_step - first_step + 1; }
  long long component_size() const { return sigma_ur + 1; }
};

struct ExplorationTrace {
  long long n = 0;
  int d = 0;
  double p = 0.0;
  long long start_vertex = 0;
  bool full_graph = false;   // ran under the full-graph stop rule
  bool truncated = false;    // hit a step cap before the stop rule fired
  std::vector<StepRecord> steps;
  std::vector<PhaseStats> phases;

  const PhaseStats& phase_one() const;
};

enum class ActivePolicy : std::uint8_t { kFifo, kLifo };
enum class StopRule : std::uint8_t { kFirstComponent, kFullGraph };

struct ExploreOptions {
  std::optional<long long> start;  // empty: uniform random start vertex
  StopRule stop = StopRule::kFirstComponent;
  ActivePolicy policy = ActivePolicy::kFifo;
  std::optional<long long> step_cap;
};

// Lazy mode: the matching is revealed pair by pair, retention drawn per edge.
ExplorationTrace explore(const Params& params, const ExploreOptions& opt, RandomStream& rs);

// Fixed mode: replay over a sampled matching with its mask.
ExplorationTrace explore(const Matching& m, const ExploreOptions& opt, RandomStream& rs);

long long component_size_of_start(const ExplorationTrace& tr);

// Largest component over a completed full-graph trace.
long long max_component_size(const ExplorationTrace& tr);

struct IdentityReport {
  bool pass = true;
  std::string failure;        // empty when pass
  long long step = -1;        // 1-based step at fault, when applicable
};

// Recomputes every per-step and per-phase identity from the raw step records
// and cross-checks the run counters: the active-set recursion, the fresh
// vertex identity, the step-count split, the stub-balance identity, and the
// component-size sandwich. Counters are accumulated during the run and never
// back-filled, so this is a genuine cross-validation.
IdentityReport check_counter_identities(const ExplorationTrace& tr);

// CSV: t,e,h,class,retained,m,active,fresh,fresh_reseed
void write_trace_csv(std::ostream& os, const ExplorationTrace& tr);

}  // namespace regulus
