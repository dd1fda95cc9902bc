#pragma once

namespace regulus::stats {

// Regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double reg_gamma_upper(double a, double x);

// Survival p-value of a chi-square statistic with df degrees of freedom.
double chi_square_pvalue(double x, int df);

// Regularized incomplete beta I_x(a, b).
double reg_beta(double a, double b, double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Upper quantile of the standard normal, i.e. z with P(Z <= z) = q.
double normal_quantile(double q);

// z defaults to the two-sided 95% normal quantile.
Interval wilson(long long successes, long long trials, double z = 1.959963984540054);

// Exact (conservative) binomial interval at confidence 1 - alpha.
Interval clopper_pearson(long long successes, long long trials, double alpha = 0.05);

// Least squares fit y = slope * x + intercept.
struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // residual-based standard error; 0 when df <= 0
};
Fit ols(const double* x, const double* y, int count);

}  // namespace regulus::stats
