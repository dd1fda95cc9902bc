#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "regulus/params.hpp"
#include "regulus/random.hpp"

using namespace regulus;

TEST_CASE("streams are pure functions of (seed, stream, counter)") {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.u64() == b.u64());

  RandomStream c(42, 8);
  RandomStream d(43, 7);
  bool differs_c = false, differs_d = false;
  RandomStream a2(42, 7);
  for (int i = 0; i < 100; ++i) {
    auto x = a2.u64();
    differs_c |= (x != c.u64());
    differs_d |= (x != d.u64());
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("unit stays in [0,1) and unit_pos in (0,1]") {
  RandomStream rs(1, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = rs.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double v = rs.unit_pos();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("below(n) is in range and roughly uniform") {
  RandomStream rs(9, 3);
  const std::uint64_t n = 3;
  const int draws = 300000;
  long long counts[3] = {0, 0, 0};
  for (int i = 0; i < draws; ++i) {
    auto v = rs.below(n);
    REQUIRE(v < n);
    ++counts[v];
  }
  // 4.5 sigma band around the expected count
  double expect = draws / 3.0;
  double sd = std::sqrt(draws * (1.0 / 3.0) * (2.0 / 3.0));
  for (auto c : counts) CHECK(std::abs(c - expect) < 4.5 * sd);
}

TEST_CASE("gaussian moments") {
  RandomStream rs(5, 11);
  const int draws = 400000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    double g = rs.gaussian();
    s1 += g;
    s2 += g * g;
  }
  double mean = s1 / draws;
  double var = s2 / draws - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Params::with_p(3, 3, 0.5), std::invalid_argument);   // odd n*d
  CHECK_THROWS_AS(Params::with_p(4, 2, 0.5), std::invalid_argument);   // d too small
  CHECK_THROWS_AS(Params::with_p(4, 3, 1.5), std::invalid_argument);   // p out of range
  CHECK_THROWS_AS(Params::with_p(0, 3, 0.5), std::invalid_argument);
  auto pr = Params::with_p(4, 3, 0.5, 1.0);
  CHECK(pr.threshold() == doctest::Approx(std::cbrt(4.0) * std::cbrt(4.0)));
  CHECK_THROWS_AS(Params::with_p(4, 3, 0.5).threshold(), std::invalid_argument);
}

TEST_CASE("window parameterization") {
  auto pr = Params::with_lambda(1000, 3, 0.0, 1.0);
  CHECK(pr.p == doctest::Approx(0.5));
  auto pr2 = Params::with_lambda(1000, 4, 3.0, 1.0);
  CHECK(pr2.p == doctest::Approx((1.0 + 3.0 / 10.0) / 3.0));
  CHECK(pr2.lambda.has_value());
  CHECK(*pr2.lambda == 3.0);
  CHECK_THROWS_AS(Params::with_lambda(8, 3, -4.0, 1.0), std::invalid_argument);
}

TEST_CASE("horizons at reference size") {
  // n = 10^4, d = 3, A = 2: floor(2*2*10^4{2/3}) = floor(1856.63) = 1856
  CHECK(horizon_lower(10000, 3, 2.0) == 1857);
  CHECK(horizon_upper(10000, 3, 2.0) == 1856 - 100 - 1);
  CHECK(short_horizon(10000, 2.0) == 116);  // floor(464.16 / 4)
  CHECK(fresh_slack(10000, 2.0) == doctest::Approx(2.0 * std::pow(1e4, 4.0 / 15.0)));
  CHECK_THROWS_AS(horizon_upper(16, 3, 0.1), std::invalid_argument);
}
