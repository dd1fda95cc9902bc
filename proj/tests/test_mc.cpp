#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "regulus/mc.hpp"
#include "regulus/oracles.hpp"
#include "regulus/params.hpp"
#include "regulus/theory.hpp"

using namespace regulus;

namespace {

double tail_truth(const std::map<long long, double>& law, double threshold) {
  double s = 0.0;
  for (const auto& [size, prob] : law)
    if (static_cast<double>(size) > threshold) s += prob;
  return s;
}

}  // namespace

TEST_CASE("tail estimates cover the exhaustive law on the smallest graph") {
  const auto full = oracle::exhaustive_small_graph(4, 3, 0.5, false);
  const double truth_vertex = tail_truth(full.comp_of_v0, 2.0);
  const double truth_max = tail_truth(full.comp_max, 2.0);
  REQUIRE(truth_vertex > 0.05);
  REQUIRE(truth_max > truth_vertex - 1e-12);

  Params pr = Params::with_p(4, 3, 0.5);
  mc::RunOptions ro;
  ro.threshold_override = 2.0;
  ro.confidence = 0.99;

  const long long trials = 60000;
  auto ev = mc::run_tail(pr, mc::TailMode::kVertex, false, trials, 20240819, ro);
  CHECK(ev.mode == "vertex");
  CHECK(ev.trials == trials);
  CHECK(ev.successes >= 0);
  CHECK(ev.ci_lo <= doctest::Approx(truth_vertex).epsilon(0.0).scale(0));
  CHECK(ev.ci_lo <= truth_vertex);
  CHECK(truth_vertex <= ev.ci_hi);

  auto em = mc::run_tail(pr, mc::TailMode::kMax, false, trials, 917, ro);
  CHECK(em.mode == "max");
  CHECK(em.ci_lo <= truth_max);
  CHECK(truth_max <= em.ci_hi);
  CHECK(em.p_hat >= ev.p_hat - 0.02);  // max stochastically dominates the rooted size

  const auto cond = oracle::exhaustive_small_graph(4, 3, 0.5, true);
  const double truth_cond = tail_truth(cond.comp_of_v0, 2.0);
  auto ec = mc::run_tail(pr, mc::TailMode::kVertex, true, 30000, 4242, ro);
  CHECK(ec.conditioned_simple);
  CHECK(ec.ci_lo <= truth_cond);
  CHECK(truth_cond <= ec.ci_hi);
}

TEST_CASE("simple-pairing frequency covers the exact fraction") {
  const auto full = oracle::exhaustive_small_graph(4, 3, 0.5, false);
  const double truth = static_cast<double>(full.p_simple.convert_to<double>());

  mc::RunOptions ro;
  ro.confidence = 0.99;
  auto est = mc::estimate_simple_prob(4, 3, 30000, 7, ro);
  CHECK(est.mode == "simple");
  CHECK_FALSE(est.p.has_value());
  CHECK_FALSE(est.lambda.has_value());
  CHECK_FALSE(est.A.has_value());
  CHECK(est.ci_lo <= truth);
  CHECK(truth <= est.ci_hi);

  mc::RunOptions cp = ro;
  cp.clopper_pearson = true;
  auto exact = mc::estimate_simple_prob(4, 3, 30000, 7, cp);
  CHECK(exact.successes == est.successes);  // same seed, same trials
  CHECK(exact.ci_lo <= truth);
  CHECK(truth <= exact.ci_hi);
  CHECK(exact.ci_hi - exact.ci_lo >= est.ci_hi - est.ci_lo - 1e-6);
}

TEST_CASE("trial streams make the count independent of the thread split") {
  Params pr = Params::with_lambda(60, 3, 0.5, 1.0);
  mc::RunOptions one;
  one.threads = 1;
  mc::RunOptions four;
  four.threads = 4;

  auto a = mc::run_tail(pr, mc::TailMode::kMax, false, 5000, 11, one);
  auto b = mc::run_tail(pr, mc::TailMode::kMax, false, 5000, 11, four);
  CHECK(a.successes == b.successes);
  CHECK(mc::tail_csv_row(a, true) == mc::tail_csv_row(b, true));

  auto av = mc::run_tail(pr, mc::TailMode::kVertex, true, 2000, 5, one);
  auto bv = mc::run_tail(pr, mc::TailMode::kVertex, true, 2000, 5, four);
  CHECK(av.successes == bv.successes);

  // Shifting the stream offset changes the sample, same seed or not.
  mc::RunOptions shifted = one;
  shifted.stream_offset = 5000;
  auto c = mc::run_tail(pr, mc::TailMode::kMax, false, 5000, 11, shifted);
  CHECK(c.successes != a.successes);
}

TEST_CASE("run_tail validates thresholds") {
  Params no_a = Params::with_p(100, 3, 0.5);
  CHECK_THROWS_AS(mc::run_tail(no_a, mc::TailMode::kMax, false, 10, 1), std::invalid_argument);

  mc::RunOptions bad;
  bad.threshold_override = 0.0;
  CHECK_THROWS_AS(mc::run_tail(no_a, mc::TailMode::kMax, false, 10, 1, bad),
                  std::invalid_argument);

  mc::RunOptions ok;
  ok.threshold_override = 4.0;
  CHECK_THROWS_AS(mc::run_tail(no_a, mc::TailMode::kMax, false, 0, 1, ok),
                  std::invalid_argument);
  auto est = mc::run_tail(no_a, mc::TailMode::kMax, false, 50, 1, ok);
  CHECK_FALSE(est.A.has_value());
  CHECK(est.p.has_value());
}

TEST_CASE("audits pass with honest slack on a small instance") {
  Params pr = Params::with_lambda(400, 3, 0.0, 1.0);
  const long long upper = horizon_upper(400, 3, 1.0);
  const long long lower = horizon_lower(400, 3, 1.0);

  mc::AuditTunables tun;
  tun.m = 60.0;
  auto fresh = mc::lemma_audit("fresh-count", pr, 400, tun, 31, {});
  CHECK(fresh.event == "fresh-count");
  CHECK(fresh.horizon == upper);
  CHECK_FALSE(fresh.vacuous);
  CHECK(fresh.rhs < 0.01);
  CHECK(fresh.exceedances == 0);
  CHECK(fresh.pass);
  CHECK(fresh.tunables.at("m") == doctest::Approx(60.0));

  mc::AuditTunables loose;  // default slack is far too small at n = 400
  auto vac = mc::lemma_audit("fresh-count", pr, 400, loose, 31, {});
  CHECK(vac.vacuous);
  CHECK(vac.pass);
  CHECK(vac.trials == 0);
  CHECK(vac.rhs >= 1.0);

  mc::AuditTunables mp;
  mp.m = 60.0;
  mp.h = 60.0;
  auto mu = mc::lemma_audit("mu-prime-sum", pr, 300, mp, 32, {});
  CHECK(mu.horizon == upper);
  CHECK_FALSE(mu.vacuous);
  CHECK(mu.exceedances == 0);
  CHECK(mu.pass);

  mc::AuditTunables pu;
  pu.l = 60.0;
  auto part = mc::lemma_audit("partial-unseen", pr, 400, pu, 33, {});
  CHECK(part.horizon == lower);
  CHECK_FALSE(part.vacuous);
  CHECK(part.exceedances == 0);
  CHECK(part.pass);

  auto width = mc::lemma_audit("active-width", pr, 400, {}, 34, {});
  CHECK(width.horizon == lower);
  CHECK_FALSE(width.vacuous);
  CHECK(width.pass);
  CHECK(width.tunables.at("omega") ==
        doctest::Approx(3.0 * static_cast<double>(lower) / 2.0));

  auto anf = mc::lemma_audit("active-nonfresh-sum", pr, 400, {}, 35, {});
  CHECK_FALSE(anf.vacuous);
  CHECK(anf.rhs < 0.011);
  CHECK(anf.pass);

  mc::AuditTunables rn;
  rn.theta = 60.0;
  auto ret = mc::lemma_audit("retained-nonfresh-sum", pr, 400, rn, 36, {});
  CHECK_FALSE(ret.vacuous);
  CHECK(ret.exceedances == 0);
  CHECK(ret.pass);

  // The drift-gap rate e^{-n^{1/10}} only bites at astronomical n.
  auto gap = mc::lemma_audit("drift-gap", pr, 100, {}, 37, {});
  CHECK(gap.vacuous);
  CHECK(gap.pass);
  CHECK(gap.trials == 0);
  CHECK(gap.horizon == lower);
}

TEST_CASE("audit validation and determinism") {
  Params pr = Params::with_lambda(400, 3, 0.0, 1.0);

  CHECK_THROWS_AS(mc::lemma_audit("no-such-event", pr, 10, {}, 1, {}),
                  std::invalid_argument);

  Params no_a = Params::with_p(400, 3, 0.5);
  CHECK_THROWS_AS(mc::lemma_audit("fresh-count", no_a, 10, {}, 1, {}),
                  std::invalid_argument);

  mc::AuditTunables wide;
  wide.omega = 1e9;
  CHECK_THROWS_AS(mc::lemma_audit("active-width", pr, 10, wide, 1, {}),
                  theory::hypothesis_error);

  mc::AuditTunables low_h;
  low_h.h = 0.5;
  low_h.m = 60.0;
  CHECK_THROWS_AS(mc::lemma_audit("mu-prime-sum", pr, 10, low_h, 1, {}),
                  theory::hypothesis_error);
  CHECK_THROWS_AS(mc::lemma_audit("active-nonfresh-sum", pr, 10, low_h, 1, {}),
                  theory::hypothesis_error);

  CHECK(mc::audit_events().size() == 7);
  for (const auto& name : mc::audit_events()) {
    // Every event either runs or reports itself vacuous; none may throw here.
    mc::AuditTunables tun;
    tun.m = 60.0;
    tun.h = 60.0;
    tun.l = 60.0;
    tun.theta = 60.0;
    auto rep = mc::lemma_audit(name, pr, 50, tun, 2, {});
    CHECK(rep.event == name);
    CHECK((rep.vacuous || rep.trials == 50));
  }

  mc::AuditTunables tun;
  tun.m = 60.0;
  mc::RunOptions two;
  two.threads = 2;
  auto a = mc::lemma_audit("fresh-count", pr, 300, tun, 31, {});
  auto b = mc::lemma_audit("fresh-count", pr, 300, tun, 31, two);
  CHECK(a.exceedances == b.exceedances);
  CHECK(mc::audit_csv_row(a, true) == mc::audit_csv_row(b, true));
}

TEST_CASE("csv and json round-trips") {
  mc::TailEstimate e;
  e.n = 10000;
  e.d = 3;
  e.p = 0.5;
  e.A = 2.0;
  e.mode = "max";
  e.conditioned_simple = false;
  e.trials = 200000;
  e.successes = 1234;
  e.p_hat = 0.00617;
  e.ci_lo = 0.0058;
  e.ci_hi = 0.0065;
  e.seed = 987654321;
  e.elapsed_s = 12.75;

  const std::string row = mc::tail_csv_row(e, false);
  const auto back = mc::tail_from_csv_row(row);
  CHECK(mc::tail_csv_row(back, false) == row);
  CHECK(back.lambda == e.lambda);
  CHECK(back.mode == "max");
  CHECK(back.seed == e.seed);

  const std::string stable_row = mc::tail_csv_row(e, true);
  CHECK(mc::tail_from_csv_row(stable_row).elapsed_s == 0.0);
  CHECK(stable_row != row);

  // Header shape matches the rows.
  std::size_t commas = 0;
  for (char c : mc::tail_csv_header()) commas += c == ',';
  std::size_t row_commas = 0;
  for (char c : row) row_commas += c == ',';
  CHECK(commas == 13);
  CHECK(row_commas == 13);

  const auto jback = mc::tail_from_json(mc::tail_json(e, false));
  CHECK(jback.p_hat == e.p_hat);
  CHECK(jback.elapsed_s == e.elapsed_s);
  CHECK(jback.p == e.p);
  CHECK_FALSE(jback.lambda.has_value());
  CHECK(jback.A == e.A);
  CHECK(jback.trials == e.trials);

  mc::TailEstimate s;  // simple-probability row leaves p, lambda, A empty
  s.n = 4;
  s.d = 3;
  s.mode = "simple";
  s.trials = 100;
  s.successes = 13;
  s.p_hat = 0.13;
  s.ci_lo = 0.07;
  s.ci_hi = 0.21;
  s.seed = 5;
  const auto srow = mc::tail_csv_row(s, true);
  const auto sback = mc::tail_from_csv_row(srow);
  CHECK_FALSE(sback.p.has_value());
  CHECK_FALSE(sback.A.has_value());
  CHECK(mc::tail_csv_row(sback, true) == srow);

  CHECK_THROWS_AS(mc::tail_from_csv_row("1,2,3"), std::invalid_argument);
  CHECK_THROWS_AS(mc::tail_from_csv_row("x,4,0.5,,,max,0,1,0,0,0,0,1,0"),
                  std::invalid_argument);

  mc::AuditReport r;
  r.event = "fresh-count";
  r.n = 10000;
  r.d = 3;
  r.p = 0.5;
  r.A = 2.0;
  r.horizon = 1755;
  r.trials = 1000;
  r.exceedances = 0;
  r.frequency = 0.0;
  r.rhs = 0.00115;
  r.se = 0.0;
  r.vacuous = false;
  r.pass = true;
  r.tunables["m"] = 250.0;
  r.seed = 42;
  r.elapsed_s = 3.5;
  const auto rback = mc::audit_from_json(mc::audit_json(r, false));
  CHECK(rback.event == r.event);
  CHECK(rback.tunables.at("m") == 250.0);
  CHECK(rback.rhs == r.rhs);
  CHECK(rback.pass == r.pass);
  CHECK_FALSE(rback.lambda.has_value());
  CHECK(mc::audit_json(rback, false) == mc::audit_json(r, false));
}

TEST_CASE("scaling diagnostic orders the grid and fits the decay") {
  std::vector<double> grid{0.8, 1.2};
  auto rep = mc::scaling_diagnostic(3, 500, 0.0, grid, 3000, 99, {});
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.points[0].A == 0.8);
  CHECK(rep.points[1].A == 1.2);
  CHECK(rep.points[0].estimate.mode == "max");
  CHECK(rep.points[0].estimate.p_hat > rep.points[1].estimate.p_hat);
  CHECK(rep.monotone_decreasing);
  CHECK(rep.min_successes == std::min(rep.points[0].estimate.successes,
                                      rep.points[1].estimate.successes));
  for (const auto& pt : rep.points) {
    CHECK(pt.g == theory::g_exponent(pt.A, 0.0, 3));
    if (!pt.flagged_low) CHECK(std::isfinite(pt.y));
  }
  if (!rep.points[0].flagged_low && !rep.points[1].flagged_low)
    CHECK(std::isfinite(rep.slope));

  auto again = mc::scaling_diagnostic(3, 500, 0.0, grid, 3000, 99, {});
  CHECK(mc::scaling_json(rep, true) == mc::scaling_json(again, true));

  CHECK_THROWS_AS(mc::scaling_diagnostic(3, 500, 0.0, {1.0}, 100, 1, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc::scaling_diagnostic(3, 500, 0.0, {1.0, 1.0}, 100, 1, {}),
                  std::invalid_argument);
}
