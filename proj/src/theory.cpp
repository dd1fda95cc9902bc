#include "regulus/theory.hpp"

#include <cmath>
#include <map>

#include "regulus/params.hpp"

namespace regulus::theory {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void hypothesis(bool ok, const char* what) {
  if (!ok) throw hypothesis_error(what);
}

}  // namespace

double g_exponent(double A, double lambda, int d, ExponentVariant variant) {
  require(d >= 3, "d must be >= 3");
  require(A > 0.0, "A must be positive");
  long double a = A, l = lambda, dd = d;
  long double cubic = a * a * a * (dd - 1) * (dd - 2) / (8 * dd * dd);
  long double linear_coef = variant == ExponentVariant::kHeadline
                                ? (dd - 1) / (2 * dd)
                                : (dd - 2) * (dd - 2) / (2 * dd * (dd - 1));
  long double quad = l * l * a * (dd - 1) / (2 * (dd - 2));
  return static_cast<double>(cubic - l * a * a * linear_coef + quad);
}

double q_upper(long long T, double p, int d, long long n) {
  require(d >= 3, "d must be >= 3");
  require(n >= 1, "n must be >= 1");
  require(T >= 0, "T must be >= 0");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  long double t = T;
  return static_cast<double>(p * (1.0L - 2.0L / d) * t * (t - 1) / (2.0L * n));
}

double q_lower_curve(double t, double p, int d, long long n, double A) {
  require(d >= 3, "d must be >= 3");
  require(n >= 1, "n must be >= 1");
  require(A > 0.0, "A must be positive");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  long double tt = t;
  return static_cast<double>(p * (1.0L - 2.0L / d) * tt * tt / (2.0L * n) +
                             static_cast<long double>(fresh_slack(n, A)));
}

void StepLawReal::validate() const {
  require(!outcomes.empty(), "step law has no outcomes");
  long double total = 0;
  for (auto& [v, q] : outcomes) {
    (void)v;
    require(q >= 0.0, "step law has a negative probability");
    total += q;
  }
  require(std::abs(static_cast<double>(total) - 1.0) < 1e-12,
          "step law probabilities must sum to 1");
}

namespace {

// Distribution of the (t+1)-fold sum by plain long double convolution.
std::map<long long, long double> sum_distribution(long long steps, const StepLawReal& law) {
  std::map<long long, long double> cur;
  cur[0] = 1.0L;
  for (long long s = 0; s < steps; ++s) {
    std::map<long long, long double> next;
    for (auto& [pos, w] : cur)
      for (auto& [v, q] : law.outcomes) {
        if (q == 0.0) continue;
        next[pos + v] += w * static_cast<long double>(q);
      }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

double ballot_bound_generic(long long t, long long k, long long h, const StepLawReal& law) {
  law.validate();
  require(t >= 0, "t must be >= 0");
  if (k < 1) return 0.0;
  double p_h = 0.0;
  for (auto& [v, q] : law.outcomes)
    if (v == h) p_h += q;
  hypothesis(p_h > 0.0, "step law puts no mass on the starting level");
  require(t <= 4000, "t too large for the convolution bound");
  auto dist = sum_distribution(t + 1, law);
  auto it = dist.find(k);
  long double point = it == dist.end() ? 0.0L : it->second;
  return static_cast<double>((1.0L / p_h) * (static_cast<long double>(k) / (t + 1)) * point);
}

namespace {

// P(sum of N retained-walk increments equals s): increments are d-2 with
// probability p and -1 otherwise, so the sum determines the binomial count.
double regular_sum_point(long long N, long long s, int d, double p) {
  long long shifted = s + N;  // = (d-1) * (number of retained steps)
  if (shifted < 0 || shifted % (d - 1) != 0) return 0.0;
  long long j = shifted / (d - 1);
  if (j < 0 || j > N) return 0.0;
  double lg = std::lgamma(N + 1.0) - std::lgamma(j + 1.0) - std::lgamma(N - j + 1.0);
  double logp = j == 0 ? 0.0 : j * std::log(p);
  double logq = j == N ? 0.0 : (N - j) * std::log1p(-p);
  return std::exp(lg + logp + logq);
}

}  // namespace

double ballot_bound_regular(long long t, long long k, int d, double p) {
  require(d >= 3, "d must be >= 3");
  require(t >= 0, "t must be >= 0");
  hypothesis(p > 0.0 && p <= 1.0, "retention probability must lie in (0, 1]");
  if (k < 1) return 0.0;
  if (d >= 4) {
    long long target = k + d - 4;
    return static_cast<double>(target) / (p * p * (t + 2)) *
           regular_sum_point(t + 2, target, d, p);
  }
  return static_cast<double>(k) / (p * p * p * (t + 3)) * regular_sum_point(t + 3, k, d, p);
}

double binomial_point_bound(long long N, double P, double x) {
  require(N >= 1, "N must be >= 1");
  require(P > 0.0 && P < 1.0, "P must lie in (0, 1)");
  hypothesis(P * N >= 1.0, "need N P >= 1");
  hypothesis(x * (1.0 - P) * N / 3.0 >= 1.0, "need x (1-P) N / 3 >= 1");
  long double nn = N, pp = P, xx = x;
  long double v = pp * (1 - pp) * nn;
  long double expo = -xx * xx / (2 * v) + xx / ((1 - pp) * nn) + xx * xx * xx / (pp * pp * nn * nn);
  return static_cast<double>(std::exp(expo) / std::sqrt(2 * 3.14159265358979323846L * v));
}

double chernoff_bound(long long N, double P, double x) {
  require(N >= 1, "N must be >= 1");
  require(P >= 0.0 && P <= 1.0, "P must lie in [0, 1]");
  hypothesis(x >= 0.0, "need x >= 0");
  long double denom = 2.0L * (static_cast<long double>(N) * P + x / 3.0L);
  if (denom <= 0.0L) return x == 0.0 ? 1.0 : 0.0;
  return static_cast<double>(std::exp(-static_cast<long double>(x) * x / denom));
}

double reflection_density(double x, double y, double mu, double t, double z) {
  require(t > 0.0, "t must be positive");
  if (x < y) throw std::domain_error("start below the barrier");
  if (z < y + mu * t) throw std::domain_error("endpoint below the barrier");
  if (x == y || z == y + mu * t) return 0.0;
  long double lt = t;
  long double gauss = std::exp(-static_cast<long double>(z - x) * (z - x) / (2 * lt)) /
                      std::sqrt(2 * 3.14159265358979323846L * lt);
  long double kill = std::exp(2 * static_cast<long double>(x - y) *
                              (static_cast<long double>(mu) * lt + y - z) / lt);
  return static_cast<double>(gauss * (1 - kill));
}

double tilt_nu(long long t_prime, long long n, double p, int d) {
  require(d >= 3, "d must be >= 3");
  require(n >= 1, "n must be >= 1");
  long double scaled = p * (1.0L - static_cast<long double>(t_prime) / n);
  require(scaled > 0.0L && scaled < 1.0L, "tilt argument outside (0, 1)");
  return static_cast<double>((std::log(1 - scaled) - std::log((d - 2) * scaled)) / (d - 1));
}

double tilt_gamma(double p, int d) {
  require(d >= 3, "d must be >= 3");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  return static_cast<double>(
      std::log((1.0L - p) / (p * (d - 2))) / (d - 1));
}

double x_offset(long long k, double lambda, long long T, int d, long long n) {
  require(d >= 3, "d must be >= 3");
  require(n >= 1, "n must be >= 1");
  long double shift = lambda * (T + 2) / std::cbrt(static_cast<long double>(n));
  return static_cast<double>((k + d - 4 - shift) / (d - 1));
}

double BrownianGeometry::f(double t) const {
  long double dd = d, tt = t, tp = t_prime;
  return static_cast<double>((dd - 2) / (dd * (dd - 1)) * (tt * tt + 2 * tt * tp) / (2.0L * n) -
                             eps * std::cbrt(static_cast<long double>(n)) / (2.0L * A));
}

double BrownianGeometry::phi(double t) const {
  long double root = std::sqrt(static_cast<long double>(d) - 2);
  return static_cast<double>(f(t) / root +
                             eps * std::cbrt(static_cast<long double>(n)) / (4.0L * A * root));
}

double BrownianGeometry::chord1(double t) const {
  double half = static_cast<double>(t_second) / 2.0;
  double y0 = phi(0.0), y1 = phi(half);
  return y0 + (y1 - y0) * (t / half);
}

double BrownianGeometry::chord2(double t) const {
  double half = static_cast<double>(t_second) / 2.0;
  double y1 = phi(half), y2 = phi(static_cast<double>(t_second));
  return y1 + (y2 - y1) * ((t - half) / half);
}

BrownianGeometry brownian_geometry(double A, long long n, int d, double eps, double lambda) {
  require(d >= 3, "d must be >= 3");
  require(A > 0.0, "A must be positive");
  require(n >= 1, "n must be >= 1");
  require(eps > 0.0, "eps must be positive");
  (void)lambda;  // the window location drops out of this scaffolding
  BrownianGeometry g;
  g.T = horizon_lower(n, d, A);
  g.t_prime = short_horizon(n, A);
  g.t_second = g.T - g.t_prime;
  require(g.t_second > 0, "second segment is empty at these parameters");
  g.n = n;
  g.d = d;
  g.A = A;
  g.eps = eps;
  double n13 = std::cbrt(static_cast<double>(n));
  g.terminal = g.phi(static_cast<double>(g.t_second)) + n13 / (4.0 * A);
  g.mid_band = {g.terminal / 2.0 - std::sqrt(A) * n13, g.terminal / 2.0};
  g.end_band = {g.terminal - n13 / (8.0 * A), g.terminal};
  return g;
}

double envelope(double A, long long n, int d, double lambda, EnvelopeMode mode, double c,
                ExponentVariant variant) {
  require(c > 0.0, "c must be positive");
  require(n >= 1, "n must be >= 1");
  double G = g_exponent(A, lambda, d, variant);
  double n13 = std::cbrt(static_cast<double>(n));
  if (mode == EnvelopeMode::kVertex) return c / std::sqrt(A) / n13 * std::exp(-G);
  return c / (A * std::sqrt(A)) * std::exp(-G);
}

}  // namespace regulus::theory
