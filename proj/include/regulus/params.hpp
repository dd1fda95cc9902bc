#pragma once

#include <cstdint>
#include <optional>

namespace regulus {

// Model parameters: n vertices of degree d, each edge kept independently
// with probability p. p can be given directly or through the window
// parameterization p = (1 + lambda * n^{-1/3}) / (d - 1); in the latter case
// lambda is remembered for reporting. A is the size-threshold multiplier
// (thresholds are stated as A * n^{2/3} vertices).
struct Params {
  long long n = 0;
  int d = 0;
  double p = 0.0;
  std::optional<double> lambda;
  std::optional<double> A;

  static Params with_p(long long n, int d, double p,
                       std::optional<double> A = std::nullopt);
  static Params with_lambda(long long n, int d, double lambda, double A);

  // A * n^{2/3}; requires A to be set.
  double threshold() const;

  // Throws std::invalid_argument on violations (n < 1, d < 3, n*d odd,
  // p outside [0, 1], A <= 0).
  void validate() const;
};

double critical_p(long long n, int d, double lambda);

// n^{2/3} computed as cbrt(n)^2 to keep floor() decisions stable.
double n_two_thirds(long long n);

// Step horizons for the two tail analyses. Every consumer takes the horizon
// explicitly; nothing guesses which one applies.
long long horizon_upper(long long n, int d, double A);  // floor((d-1)A n^{2/3}) - ceil(sqrt n) - 1
long long horizon_lower(long long n, int d, double A);  // floor((d-1)A n^{2/3}) + 1
long long short_horizon(long long n, double A);         // floor(n^{2/3} / A^2)

// Default slack used by the fresh-vertex audits: A * n^{4/15}.
double fresh_slack(long long n, double A);

}  // namespace regulus
