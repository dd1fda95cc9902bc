#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "regulus/exploration.hpp"
#include "regulus/matching.hpp"

using namespace regulus;

namespace {

ExploreOptions full_fifo(std::optional<long long> start = 0) {
  ExploreOptions o;
  o.start = start;
  o.stop = StopRule::kFullGraph;
  return o;
}

}  // namespace

TEST_CASE("identities hold over random lazy traces") {
  int checked = 0;
  for (int d : {3, 4, 5}) {
    for (long long n : {10, 40, 150}) {
      if ((n * d) % 2) continue;
      for (double p : {0.0, 0.2, 1.0 / (d - 1), 0.6, 1.0}) {
        for (auto policy : {ActivePolicy::kFifo, ActivePolicy::kLifo}) {
          for (auto stop : {StopRule::kFirstComponent, StopRule::kFullGraph}) {
            for (int rep = 0; rep < 8; ++rep) {
              RandomStream rs(555, static_cast<std::uint64_t>(checked * 131 + rep));
              ExploreOptions o;
              o.policy = policy;
              o.stop = stop;
              auto tr = explore(Params::with_p(n, d, p), o, rs);
              auto rep_ = check_counter_identities(tr);
              INFO("d=", d, " n=", n, " p=", p, " failure=", rep_.failure, " step=", rep_.step);
              REQUIRE(rep_.pass);
              ++checked;
            }
          }
        }
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("full-graph traces pair every stub and partition the vertices") {
  for (int rep = 0; rep < 30; ++rep) {
    RandomStream rs(77, rep);
    auto pr = Params::with_p(60, 3, 0.45);
    auto tr = explore(pr, full_fifo(), rs);
    CHECK_FALSE(tr.truncated);
    CHECK(static_cast<long long>(tr.steps.size()) == pr.n * pr.d / 2);
    // Phases cover every vertex except those drained entirely through
    // non-retained hits; such vertices are isolated in the retained graph.
    long long vertices = 0;
    for (const auto& ph : tr.phases) {
      CHECK(ph.closed);
      vertices += ph.component_size();
    }
    CHECK(vertices <= pr.n);
    // Unseen stubs can never outnumber what pairing has left.
    long long t = 1;
    for (const auto& r : tr.steps) {
      CHECK(r.active_after <= pr.n * pr.d - 2 * t);
      ++t;
    }
  }
}

TEST_CASE("fixed-mode component sizes agree with the union-find reference") {
  for (int rep = 0; rep < 60; ++rep) {
    RandomStream rs(901, rep);
    long long n = rep % 2 ? 46 : 45;
    auto pr = Params::with_p(n, rep % 2 ? 3 : 4, 0.3 + 0.01 * (rep % 30));
    auto m = sample_mask(sample_matching(pr, rs), pr.p, rs);
    auto ref = components(m);
    long long singleton_components = 0;
    for (auto s : ref.sizes)
      if (s == 1) ++singleton_components;

    for (auto policy : {ActivePolicy::kFifo, ActivePolicy::kLifo}) {
      ExploreOptions o = full_fifo(rep % n);
      o.policy = policy;
      RandomStream ers(902, rep);
      auto tr = explore(m, o, ers);
      REQUIRE(check_counter_identities(tr).pass);
      CHECK(component_size_of_start(tr) == ref.size_of[rep % n]);
      CHECK(max_component_size(tr) == ref.max_size);
      // Each phase explores exactly one retained component.
      long long covered = 0, singleton_phases = 0;
      for (const auto& ph : tr.phases) {
        CHECK(ref.size_of[ph.root_vertex] == ph.component_size());
        covered += ph.component_size();
        if (ph.component_size() == 1) ++singleton_phases;
      }
      // Vertices no phase covers were drained while unseen; they are exactly
      // the isolated vertices that never got a phase of their own.
      CHECK(n - covered == singleton_components - singleton_phases);
    }
  }
}

TEST_CASE("everything deleted: the first phase drains d stubs") {
  for (int d : {3, 4, 5}) {
    for (int rep = 0; rep < 20; ++rep) {
      RandomStream rs(31, d * 100 + rep);
      auto tr = explore(Params::with_p(40, d, 0.0), ExploreOptions{}, rs);
      const auto& ph = tr.phase_one();
      CHECK(ph.closed);
      CHECK(component_size_of_start(tr) == 1);
      CHECK(ph.tau() >= (d + 1) / 2);
      CHECK(ph.tau() <= d);
      CHECK(ph.sigma_ur == 0);
    }
  }
}

TEST_CASE("everything kept: one giant component at d >= 3") {
  RandomStream rs(13, 5);
  auto tr = explore(Params::with_p(100, 3, 1.0), full_fifo(std::nullopt), rs);
  CHECK(tr.start_vertex >= 0);
  CHECK(tr.start_vertex < 100);
  CHECK(check_counter_identities(tr).pass);
  // Not a theorem for every pairing, but overwhelmingly likely: nearly all
  // vertices in the first phase.
  CHECK(component_size_of_start(tr) > 80);
}

TEST_CASE("explicit start vertex is honored; random start is uniform-ish") {
  RandomStream rs(19, 2);
  auto tr = explore(Params::with_p(30, 3, 0.5), full_fifo(17), rs);
  CHECK(tr.start_vertex == 17);
  CHECK(tr.phase_one().root_vertex == 17);
  CHECK(tr.phase_one().fresh_root);

  long long hits[4] = {0, 0, 0, 0};
  for (int rep = 0; rep < 4000; ++rep) {
    RandomStream r2(23, rep);
    ExploreOptions o;
    auto t2 = explore(Params::with_p(4, 3, 0.5), o, r2);
    ++hits[t2.start_vertex];
  }
  for (auto h : hits) CHECK(std::abs(h - 1000.0) < 4.5 * std::sqrt(4000 * 0.25 * 0.75));
}

TEST_CASE("step cap truncates cleanly") {
  RandomStream rs(29, 0);
  ExploreOptions o = full_fifo(0);
  o.step_cap = 25;
  auto tr = explore(Params::with_p(200, 3, 0.5), o, rs);
  CHECK(tr.truncated);
  CHECK(tr.steps.size() == 25);
  CHECK_FALSE(tr.phases.back().closed);
  CHECK(tr.phases.back().last_step == 25);
  CHECK(check_counter_identities(tr).pass);
  CHECK_THROWS_AS(max_component_size(tr), std::invalid_argument);
}

TEST_CASE("determinism: identical streams give identical traces") {
  auto run = [] {
    RandomStream rs(47, 12);
    return explore(Params::with_p(80, 4, 0.4), full_fifo(std::nullopt), rs);
  };
  auto a = run(), b = run();
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].e == b.steps[i].e);
    CHECK(a.steps[i].h == b.steps[i].h);
    CHECK(a.steps[i].retained == b.steps[i].retained);
  }
  CHECK(a.start_vertex == b.start_vertex);
}

TEST_CASE("the identity checker actually detects corruption") {
  RandomStream rs(59, 3);
  auto tr = explore(Params::with_p(50, 3, 0.5), full_fifo(0), rs);
  REQUIRE(check_counter_identities(tr).pass);

  auto broken = tr;
  broken.steps[4].active_after += 1;
  CHECK_FALSE(check_counter_identities(broken).pass);

  auto broken2 = tr;
  broken2.phases[0].sigma_ur += 1;
  CHECK_FALSE(check_counter_identities(broken2).pass);

  auto broken3 = tr;
  for (auto& s : broken3.steps)
    if (s.cls == HitClass::kFresh) {
      s.fresh_after -= 1;
      break;
    }
  CHECK_FALSE(check_counter_identities(broken3).pass);
}

TEST_CASE("trace csv shape") {
  RandomStream rs(61, 1);
  auto tr = explore(Params::with_p(10, 3, 0.5), full_fifo(0), rs);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,e,h,class,retained,m,active,fresh,fresh_reseed");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == tr.steps.size());
}
