#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regulus/coupled_walks.hpp"
#include "regulus/exploration.hpp"

using namespace regulus;

namespace {

ExplorationTrace make_trace(long long n, int d, double p, std::uint64_t stream) {
  RandomStream rs(2024, stream);
  ExploreOptions o;
  o.start = 0;
  o.stop = StopRule::kFullGraph;
  return explore(Params::with_p(n, d, p), o, rs);
}

AuxRandomness make_aux(const ExplorationTrace& tr, std::uint64_t stream) {
  RandomStream rs(7070, stream);
  return AuxRandomness::make(tr.steps.size(), 10.0, tr.n / 10, rs);
}

}  // namespace

TEST_CASE("pathwise orderings hold across parameters") {
  int runs = 0;
  for (int d : {3, 4, 5}) {
    for (long long n : {20, 60, 200}) {
      if ((n * d) % 2) continue;
      for (double p : {0.2, 1.0 / (d - 1), 0.6}) {
        for (int rep = 0; rep < 10; ++rep) {
          auto tr = make_trace(n, d, p, runs * 17 + rep);
          auto aux = make_aux(tr, runs * 17 + rep);
          auto rp = check_coupling(tr, aux);
          INFO("d=", d, " n=", n, " p=", p, " failure=", rp.failure, " at=", rp.step);
          REQUIRE(rp.pass);
          ++runs;
        }
      }
    }
  }
  CHECK(runs > 200);
}

TEST_CASE("series lengths respect the horizon and the trace") {
  auto tr = make_trace(100, 3, 0.5, 1);
  auto aux = make_aux(tr, 1);
  auto full = series(tr, SeriesKind::kXi, aux);
  CHECK(full.values.size() == tr.steps.size());
  auto capped = series(tr, SeriesKind::kXi, aux, 7);
  CHECK(capped.values.size() == 7);

  AuxRandomness tooshort;
  tooshort.m_slack = 1.0;
  tooshort.t_prime = 1;
  tooshort.u.assign(3, 0.5);
  CHECK_THROWS_AS(series(tr, SeriesKind::kMu, tooshort), std::invalid_argument);
  CHECK_NOTHROW(series(tr, SeriesKind::kXi, tooshort));  // no aux needed
}

TEST_CASE("xi sums telescope to (d-1) * retained - steps") {
  auto tr = make_trace(80, 4, 0.3, 2);
  auto aux = make_aux(tr, 2);
  auto xi = series(tr, SeriesKind::kXi, aux);
  long long retained = 0;
  for (auto& s : tr.steps) retained += s.retained;
  double total = 0;
  for (double v : xi.values) total += v;
  CHECK(total == doctest::Approx(3.0 * retained - double(xi.values.size())));
}

TEST_CASE("early cap exceeds one, so mu' vanishes at the first steps") {
  auto tr = make_trace(100, 3, 0.5, 3);
  auto aux = make_aux(tr, 3);
  CHECK(mu_cap(1, 100, 3, aux.m_slack) > 1.0);
  auto mup = series(tr, SeriesKind::kMuPrime, aux, 5);
  for (double v : mup.values) CHECK(v == 0.0);
}

TEST_CASE("fresh envelope values") {
  CHECK(a_fresh(0, 50) == doctest::Approx(49.0));
  CHECK(a_fresh(10, 50) == doctest::Approx(50.0 - 1.0 - 10.0 + 1.0));
  CHECK(a_fresh(1, 1000) == doctest::Approx(998.0 + 1.0 / 2000.0));
}

TEST_CASE("iid surrogate laws have the right moments") {
  for (int d : {3, 4, 5}) {
    auto tr = make_trace(d % 2 ? 200 : 201, d, 0.4, 4 + d);
    RandomStream rs(99, d);
    auto aux = AuxRandomness::make(tr.steps.size(), 5.0, 10, rs);
    auto dp = series(tr, SeriesKind::kDPrime, aux);
    auto d2p = series(tr, SeriesKind::kD2Prime, aux);
    // Exact two-point values.
    for (std::size_t i = 0; i < dp.values.size(); ++i) {
      bool hi = d2p.values[i] == double(d - 2);
      if (!hi) CHECK(d2p.values[i] == -1.0);
      CHECK(dp.values[i] ==
            doctest::Approx(hi ? std::sqrt(d - 2.0) : -1.0 / std::sqrt(d - 2.0)));
    }
  }
  // Sample moments of the unit law over many draws.
  ExplorationTrace dummy = make_trace(600, 3, 0.5, 77);
  RandomStream rs(1234, 0);
  auto aux = AuxRandomness::make(dummy.steps.size(), 1.0, 1, rs);
  auto dp = series(dummy, SeriesKind::kDPrime, aux);
  double s1 = 0, s2 = 0;
  for (double v : dp.values) {
    s1 += v;
    s2 += v * v;
  }
  double mean = s1 / dp.values.size();
  CHECK(std::abs(mean) < 0.1);
  CHECK(s2 / dp.values.size() == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("first hit") {
  IncrementSeries s;
  s.kind = SeriesKind::kXi;
  s.values = {1, -1, -1, -1, -1};
  auto hit = first_hit(s, 3);
  REQUIRE(hit.has_value());
  CHECK(*hit == 5);

  s.values = {1, 1, 1};
  CHECK_FALSE(first_hit(s, 3).has_value());

  s.values = {-3};
  auto h2 = first_hit(s, 3);
  REQUIRE(h2.has_value());
  CHECK(*h2 == 1);
}

TEST_CASE("coupling checker detects a tampered class") {
  // Find a trace whose first phase contains a retained partial hit.
  bool found = false;
  for (std::uint64_t stream = 0; stream < 200 && !found; ++stream) {
    auto tr = make_trace(120, 4, 0.5, 1000 + stream);
    auto aux = make_aux(tr, stream);
    REQUIRE(check_coupling(tr, aux).pass);
    long long tau = tr.phases.front().last_step;
    for (long long i = 0; i < tau; ++i) {
      auto& s = tr.steps[static_cast<std::size_t>(i)];
      if (s.cls == HitClass::kPartial && s.retained) {
        s.cls = HitClass::kFresh;  // lie about the hit class, keep m
        found = true;
        break;
      }
    }
    if (found) CHECK_FALSE(check_coupling(tr, aux).pass);
  }
  CHECK(found);
}

TEST_CASE("series names round-trip") {
  for (int i = 0; i <= static_cast<int>(SeriesKind::kD2Prime); ++i) {
    auto k = static_cast<SeriesKind>(i);
    auto back = series_from_name(series_name(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK_FALSE(series_from_name("nope").has_value());
}
