#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regulus/oracles.hpp"
#include "regulus/stats.hpp"

using namespace regulus;
using oracle::Rational;

namespace {

oracle::StepLaw half_step() {
  return {{{+1, Rational(1, 2)}, {-1, Rational(1, 2)}}};
}

}  // namespace

TEST_CASE("double factorials and binomial coefficients") {
  CHECK(oracle::double_factorial_odd(-1) == 1);
  CHECK(oracle::double_factorial_odd(5) == 15);
  CHECK(oracle::double_factorial_odd(11) == 10395);
  CHECK_THROWS_AS(oracle::double_factorial_odd(4), std::invalid_argument);
  CHECK(oracle::binomial_coefficient(11, 5) == 462);
  CHECK(oracle::binomial_coefficient(30, 15) == 155117520);
  CHECK(oracle::binomial_coefficient(5, 7) == 0);
}

TEST_CASE("step law validation") {
  oracle::StepLaw bad{{{1, Rational(1, 2)}, {-1, Rational(1, 3)}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(half_step().validate());
}

TEST_CASE("stay-positive walk, exact small cases") {
  // +-1 walk from 1: reach 2 in 3 steps without touching 0.
  auto r = oracle::walk_stay_positive(3, 1, half_step(), 2);
  CHECK(r.exact_mode);
  CHECK(r.exact == Rational(1, 4));

  // Reflection count: paths 1 -> 2 in 5 steps staying positive = C(5,3)-C(5,4) = 5.
  auto r5 = oracle::walk_stay_positive(5, 1, half_step(), 2);
  CHECK(r5.exact == Rational(5, 32));

  // Start at the barrier: already absorbed.
  CHECK(oracle::walk_stay_positive(4, 0, half_step(), std::nullopt).exact == 0);
  // Zero steps.
  CHECK(oracle::walk_stay_positive(0, 3, half_step(), 3).exact == 1);
  CHECK(oracle::walk_stay_positive(0, 3, half_step(), 2).exact == 0);

  // Survival for t steps from 1 equals C(t, floor(t/2)) / 2^t.
  auto s30 = oracle::walk_stay_positive(30, 1, half_step(), std::nullopt);
  CHECK(s30.exact_mode);
  CHECK(s30.exact == Rational(oracle::binomial_coefficient(30, 15),
                              oracle::BigInt(1) << 30));
}

TEST_CASE("stay-positive walk, float fallback past the exact cap") {
  auto s31 = oracle::walk_stay_positive(31, 1, half_step(), std::nullopt);
  CHECK_FALSE(s31.exact_mode);
  double exact31 = 300540195.0 / 2147483648.0;  // C(31,15)/2^31
  CHECK(s31.value == doctest::Approx(exact31).epsilon(1e-12));
}

TEST_CASE("sum distribution point mass") {
  CHECK(oracle::walk_sum_point(4, half_step(), 0) == Rational(3, 8));
  CHECK(oracle::walk_sum_point(4, half_step(), 5) == 0);
  oracle::StepLaw skew{{{2, Rational(1, 3)}, {-1, Rational(2, 3)}}};
  // S_2 = 4 needs both +2s: 1/9.
  CHECK(oracle::walk_sum_point(2, skew, 4) == Rational(1, 9));
}

TEST_CASE("binomial pmf and tail, float against exact") {
  double f = oracle::binomial_pmf(20, 0.3, 7);
  auto e = oracle::binomial_pmf_exact(20, Rational(3, 10), 7);
  CHECK(f == doctest::Approx(static_cast<double>(e)).epsilon(1e-13));

  CHECK(oracle::binomial_tail_ge(10, 0.5, 5) ==
        doctest::Approx(638.0 / 1024.0).epsilon(1e-13));
  CHECK(oracle::binomial_tail_ge(10, 0.5, 0) == 1.0);
  CHECK(oracle::binomial_tail_ge(10, 0.5, 11) == 0.0);

  auto te = oracle::binomial_tail_ge_exact(10, Rational(1, 2), 5);
  CHECK(te == Rational(638, 1024));

  // Large-N stability: tail at the mean is near 1/2.
  double t = oracle::binomial_tail_ge(1000000, 0.5, 500000);
  CHECK(t > 0.49);
  CHECK(t < 0.52);
}

TEST_CASE("exhaustive enumeration, two vertices of degree 3") {
  auto r = oracle::exhaustive_small_graph(2, 3, 0.5, false);
  CHECK(r.pairings == 15);
  CHECK(r.simple_pairings == 0);
  CHECK(r.p_simple == 0);
  // 9 pairings have one cross edge, 6 have three; P(|C(v0)|=2) = (9p + 6(1-(1-p)^3))/15.
  CHECK(r.comp_of_v0.at(2) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(r.comp_of_v0.at(1) == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(r.comp_max.at(2) == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("exhaustive enumeration, four vertices of degree 3") {
  auto r = oracle::exhaustive_small_graph(4, 3, 0.3, false);
  CHECK(r.pairings == 10395);
  CHECK(r.simple_pairings == 1296);
  CHECK(r.p_simple == Rational(1296, 10395));
  double mass = 0;
  for (auto& [k, q] : r.comp_of_v0) {
    CHECK(k >= 1);
    CHECK(k <= 4);
    mass += q;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  auto c = oracle::exhaustive_small_graph(4, 3, 1.0, true);
  CHECK(c.comp_of_v0.at(4) == doctest::Approx(1.0));  // K4 with everything kept
  CHECK(c.comp_max.at(4) == doctest::Approx(1.0));

  // Conditioned law still normalizes at interior p.
  auto c5 = oracle::exhaustive_small_graph(4, 3, 0.5, true);
  double m2 = 0;
  for (auto& [k, q] : c5.comp_max) {
    (void)k;
    m2 += q;
  }
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(oracle::exhaustive_small_graph(2, 3, 0.5, true), std::invalid_argument);
}

TEST_CASE("enumeration guards") {
  CHECK_THROWS_AS(oracle::exhaustive_small_graph(6, 3, 0.5, false), std::invalid_argument);
  CHECK_THROWS_AS(oracle::exhaustive_small_graph(3, 3, 0.5, false), std::invalid_argument);
}

TEST_CASE("chi-square goodness of fit helper") {
  std::map<long long, double> probs{{1, 0.25}, {2, 0.5}, {3, 0.25}};
  std::map<long long, long long> perfect{{1, 250}, {2, 500}, {3, 250}};
  CHECK(oracle::chi_square_gof(perfect, 1000, probs) == doctest::Approx(1.0));

  std::map<long long, long long> off{{1, 400}, {2, 400}, {3, 200}};
  CHECK(oracle::chi_square_gof(off, 1000, probs) < 1e-6);

  std::map<long long, long long> forbidden{{1, 250}, {2, 500}, {4, 250}};
  CHECK(oracle::chi_square_gof(forbidden, 1000, probs) == 0.0);
}

TEST_CASE("incomplete gamma and interval helpers") {
  CHECK(stats::reg_gamma_upper(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(stats::chi_square_pvalue(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Median of chi-square with 1 df is about 0.4549.
  CHECK(stats::chi_square_pvalue(0.454936, 1) == doctest::Approx(0.5).epsilon(1e-4));

  auto w = stats::wilson(50, 100);
  CHECK(w.contains(0.5));
  CHECK(w.lo > 0.39);
  CHECK(w.hi < 0.61);

  auto cp = stats::clopper_pearson(0, 10);
  CHECK(cp.lo == 0.0);
  CHECK(cp.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));

  auto cp2 = stats::clopper_pearson(10, 10);
  CHECK(cp2.hi == 1.0);
  CHECK(cp2.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
}

TEST_CASE("least squares") {
  double x[4] = {0, 1, 2, 3};
  double y[4] = {1, 3, 5, 7};
  auto f = stats::ols(x, y, 4);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0));
}
