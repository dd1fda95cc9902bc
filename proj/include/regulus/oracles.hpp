#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace regulus::oracle {

// This module is the referee: small-case exact answers computed by methods
// that share no code with the simulation or theory modules. Keep it that way.

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Integer-valued step law with exact rational probabilities summing to 1.
struct StepLaw {
  std::vector<std::pair<long long, Rational>> outcomes;
  void validate() const;  // throws std::invalid_argument
};

struct WalkProbability {
  Rational exact;   // meaningful only when exact_mode
  double value;     // double(exact), or the long-double DP result
  bool exact_mode;  // false when t exceeded the exact-arithmetic cap
};

inline constexpr long long kExactWalkCap = 30;

// P( start + S_j > barrier for all j in [1, t]  [ and start + S_t = *end_at ] )
// by forward dynamic programming over reachable positions. Exact rational
// arithmetic up to kExactWalkCap steps; longer walks fall back to long double
// and are flagged via exact_mode = false.
WalkProbability walk_stay_positive(long long t, long long start, const StepLaw& law,
                                   std::optional<long long> end_at,
                                   long long barrier = 0);

// Exact version of the sum distribution: P(S_t = s) with no barrier.
Rational walk_sum_point(long long t, const StepLaw& law, long long s);

// Log-space binomial pmf / upper tail, stable for N up to ~1e6.
double binomial_pmf(long long N, double P, long long j);
double binomial_tail_ge(long long N, double P, long long j);

Rational binomial_pmf_exact(long long N, const Rational& P, long long j);
Rational binomial_tail_ge_exact(long long N, const Rational& P, long long j);

BigInt binomial_coefficient(long long N, long long k);

// (m)!! for odd m >= -1; counts perfect matchings on m+1 points.
BigInt double_factorial_odd(long long m);

// Exhaustive enumeration over all stub pairings of n degree-d vertices and
// all 2^(nd/2) keep/delete masks. Restricted to n*d <= 14.
struct SmallGraphResult {
  std::map<long long, double> comp_of_v0;  // law of |C(vertex 0)|
  std::map<long long, double> comp_max;    // law of the largest component
  Rational p_simple;                       // fraction of pairings with no loop or double edge
  BigInt pairings;
  BigInt simple_pairings;
};
SmallGraphResult exhaustive_small_graph(int n, int d, double p, bool condition_on_simple);

// Pearson statistic of observed counts against exact cell probabilities;
// cells with expectation below min_expect are pooled into their neighbor.
// Returns the p-value.
double chi_square_gof(const std::map<long long, long long>& observed, long long trials,
                      const std::map<long long, double>& expected_probs,
                      double min_expect = 5.0);

}  // namespace regulus::oracle
