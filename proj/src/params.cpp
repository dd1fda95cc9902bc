#include "regulus/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace regulus {

Params Params::with_p(long long n, int d, double p, std::optional<double> A) {
  Params out;
  out.n = n;
  out.d = d;
  out.p = p;
  out.A = A;
  out.validate();
  return out;
}

Params Params::with_lambda(long long n, int d, double lambda, double A) {
  Params out;
  out.n = n;
  out.d = d;
  out.p = critical_p(n, d, lambda);
  out.lambda = lambda;
  out.A = A;
  out.validate();
  return out;
}

double Params::threshold() const {
  if (!A) throw std::invalid_argument("threshold(): A not set");
  return *A * n_two_thirds(n);
}

void Params::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (d < 3) throw std::invalid_argument("d must be >= 3");
  if ((n * static_cast<long long>(d)) % 2 != 0)
    throw std::invalid_argument("n*d must be even");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("p must lie in [0, 1], got " + std::to_string(p));
  if (A && !(*A > 0.0)) throw std::invalid_argument("A must be positive");
}

double critical_p(long long n, int d, double lambda) {
  if (d < 3) throw std::invalid_argument("d must be >= 3");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  double p = (1.0 + lambda / std::cbrt(static_cast<double>(n))) / (d - 1);
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("lambda places p outside [0, 1]");
  return p;
}

double n_two_thirds(long long n) {
  double c = std::cbrt(static_cast<double>(n));
  return c * c;
}

long long horizon_upper(long long n, int d, double A) {
  double base = (d - 1) * A * n_two_thirds(n);
  long long t = static_cast<long long>(std::floor(base)) -
                static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(n)))) - 1;
  if (t < 1) throw std::invalid_argument("upper horizon is empty at these parameters");
  return t;
}

long long horizon_lower(long long n, int d, double A) {
  double base = (d - 1) * A * n_two_thirds(n);
  long long t = static_cast<long long>(std::floor(base)) + 1;
  if (t < 1) throw std::invalid_argument("lower horizon is empty at these parameters");
  return t;
}

long long short_horizon(long long n, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
  return static_cast<long long>(std::floor(n_two_thirds(n) / (A * A)));
}

double fresh_slack(long long n, double A) {
  return A * std::pow(static_cast<double>(n), 4.0 / 15.0);
}

}  // namespace regulus
