#include "regulus/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace regulus::stats {

namespace {

// Series expansion of P(a, x), good for x < a + 1.
double lower_gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), good for x >= a + 1.
double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (Numerical Recipes style).
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double reg_gamma_upper(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("reg_gamma_upper: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - lower_gamma_series(a, x);
  return upper_gamma_cf(a, x);
}

double chi_square_pvalue(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_pvalue: df must be >= 1");
  if (x < 0.0) return 1.0;
  return reg_gamma_upper(df / 2.0, x / 2.0);
}

double reg_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("reg_beta: need a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x));
  // Use the symmetric form whichever side converges faster.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double normal_quantile(double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::invalid_argument("normal_quantile: need 0 < q < 1");
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval wilson(long long successes, long long trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson: trials must be positive");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson: successes out of range");
  double nn = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / nn;
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = (phat + z2 / (2.0 * nn)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center - half, center + half};
}

Interval clopper_pearson(long long successes, long long trials, double alpha) {
  if (trials <= 0) throw std::invalid_argument("clopper_pearson: trials must be positive");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("clopper_pearson: successes out of range");
  auto beta_quantile = [](double a, double b, double q) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (reg_beta(a, b, mid) < q)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double k = static_cast<double>(successes);
  double nn = static_cast<double>(trials);
  Interval out;
  out.lo = (successes == 0) ? 0.0 : beta_quantile(k, nn - k + 1.0, alpha / 2.0);
  out.hi = (successes == trials) ? 1.0 : beta_quantile(k + 1.0, nn - k, 1.0 - alpha / 2.0);
  return out;
}

Fit ols(const double* x, const double* y, int count) {
  if (count < 2) throw std::invalid_argument("ols: need at least two points");
  double sx = 0, sy = 0;
  for (int i = 0; i < count; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < count; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols: x values are all equal");
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (count > 2) {
    double ss = 0;
    for (int i = 0; i < count; ++i) {
      double r = y[i] - (f.slope * x[i] + f.intercept);
      ss += r * r;
    }
    f.slope_se = std::sqrt(ss / (count - 2) / sxx);
  }
  return f;
}

}  // namespace regulus::stats
