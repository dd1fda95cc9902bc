#pragma once

#include <stdexcept>
#include <vector>

namespace regulus::theory {

// Thrown when a stated hypothesis of a bound is violated, as opposed to a
// plain malformed argument.
struct hypothesis_error : std::domain_error {
  using std::domain_error::domain_error;
};

// The cubic-in-A rate governing the tail envelopes. Two published forms of
// the linear-in-lambda coefficient are kept side by side; they agree at
// lambda = 0 and differ otherwise.
enum class ExponentVariant { kHeadline, kAbstract };

double g_exponent(double A, double lambda, int d,
                  ExponentVariant variant = ExponentVariant::kHeadline);

// p (1 - 2/d) T (T - 1) / (2n): the centering of the capped-indicator sum.
double q_upper(long long T, double p, int d, long long n);

// p (1 - 2/d) t^2 / (2n) + A n^{4/15}: the drift allowance curve.
double q_lower_curve(double t, double p, int d, long long n, double A);

// Integer step law with real weights, for the generic ballot bound.
struct StepLawReal {
  std::vector<std::pair<long long, double>> outcomes;
  void validate() const;
};

// Bound on P(walk from h stays positive for t steps and ends at k):
// (1 / P(X = h)) * (k / (t+1)) * P(X_1 + ... + X_{t+1} = k).
// Requires P(X = h) > 0; returns 0 for k < 1.
double ballot_bound_generic(long long t, long long k, long long h, const StepLawReal& law);

// Same bound specialized to the retained-step walk started at d, whose
// increments are d-2 with probability p and -1 otherwise.
double ballot_bound_regular(long long t, long long k, int d, double p);

// Pointwise binomial bound at j >= NP + x. Hypotheses: NP >= 1 and
// x (1-P) N / 3 >= 1; violations raise hypothesis_error.
double binomial_point_bound(long long N, double P, double x);

// exp(-x^2 / (2 (NP + x/3))) for x >= 0.
double chernoff_bound(long long N, double P, double x);

// Density at z of Brownian motion from x at time t, killed at the moving
// barrier y + mu s. Zero exactly on the closed boundary; arguments strictly
// outside the domain are rejected.
double reflection_density(double x, double y, double mu, double t, double z);

// Exponential tilts used by the change-of-measure arguments.
double tilt_nu(long long t_prime, long long n, double p, int d);
double tilt_gamma(double p, int d);

// (k + d - 4 - lambda (T+2) n^{-1/3}) / (d - 1).
double x_offset(long long k, double lambda, long long T, int d, long long n);

// Piecewise-linear scaffolding over the second segment of the lower-tail
// window: the convex curve phi, its two chords, and the terminal intervals.
struct BrownianGeometry {
  long long T = 0;        // full horizon
  long long t_prime = 0;  // first-segment horizon
  long long t_second = 0; // T - t_prime
  long long n = 0;
  int d = 0;
  double A = 0.0;
  double eps = 0.0;

  double f(double t) const;
  double phi(double t) const;
  double chord1(double t) const;  // valid on [0, t_second/2]
  double chord2(double t) const;  // valid on [t_second/2, t_second]
  double terminal = 0.0;          // phi(t_second) + n^{1/3} / (4A)
  struct Band {
    double lo = 0.0, hi = 0.0;
  };
  Band mid_band;   // [terminal/2 - sqrt(A) n^{1/3}, terminal/2]
  Band end_band;   // [terminal - n^{1/3}/(8A), terminal]
};

BrownianGeometry brownian_geometry(double A, long long n, int d, double eps, double lambda);

enum class EnvelopeMode { kVertex, kMax };

// Tail envelope: c A^{-1/2} n^{-1/3} e^{-G} per vertex, c A^{-3/2} e^{-G}
// for the maximum.
double envelope(double A, long long n, int d, double lambda, EnvelopeMode mode, double c,
                ExponentVariant variant = ExponentVariant::kHeadline);

}  // namespace regulus::theory
