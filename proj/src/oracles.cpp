#include "regulus/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regulus/stats.hpp"

namespace regulus::oracle {

void StepLaw::validate() const {
  if (outcomes.empty()) throw std::invalid_argument("step law has no outcomes");
  Rational total = 0;
  for (const auto& [v, q] : outcomes) {
    (void)v;
    if (q < 0) throw std::invalid_argument("step law has a negative probability");
    total += q;
  }
  if (total != 1) throw std::invalid_argument("step law probabilities must sum to 1");
}

namespace {

template <typename Weight>
std::map<long long, Weight> dp_stay_above(long long t, long long start,
                                          const StepLaw& law, long long barrier) {
  std::map<long long, Weight> cur;
  cur[start] = Weight(1);
  for (long long step = 0; step < t; ++step) {
    std::map<long long, Weight> next;
    for (const auto& [pos, w] : cur) {
      for (const auto& [v, q] : law.outcomes) {
        if (q == 0) continue;
        long long np = pos + v;
        if (np <= barrier) continue;  // absorbed
        next[np] += w * Weight(q);
      }
    }
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return cur;
}

}  // namespace

WalkProbability walk_stay_positive(long long t, long long start, const StepLaw& law,
                                   std::optional<long long> end_at, long long barrier) {
  law.validate();
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  if (start <= barrier) return {Rational(0), 0.0, true};
  if (t == 0) {
    bool ok = !end_at || *end_at == start;
    return {Rational(ok ? 1 : 0), ok ? 1.0 : 0.0, true};
  }
  if (t <= kExactWalkCap) {
    auto dist = dp_stay_above<Rational>(t, start, law, barrier);
    Rational r = 0;
    if (end_at) {
      auto it = dist.find(*end_at);
      if (it != dist.end()) r = it->second;
    } else {
      for (const auto& [pos, w] : dist) {
        (void)pos;
        r += w;
      }
    }
    return {r, static_cast<double>(r), true};
  }
  StepLaw dlaw = law;  // reuse structure; weights read through Weight(q) below
  auto dist = dp_stay_above<long double>(t, start, dlaw, barrier);
  long double r = 0;
  if (end_at) {
    auto it = dist.find(*end_at);
    if (it != dist.end()) r = it->second;
  } else {
    for (const auto& [pos, w] : dist) {
      (void)pos;
      r += w;
    }
  }
  return {Rational(0), static_cast<double>(r), false};
}

Rational walk_sum_point(long long t, const StepLaw& law, long long s) {
  law.validate();
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  if (t > 200) throw std::invalid_argument("walk_sum_point: t too large for exact arithmetic");
  std::map<long long, Rational> cur;
  cur[0] = 1;
  for (long long step = 0; step < t; ++step) {
    std::map<long long, Rational> next;
    for (const auto& [pos, w] : cur)
      for (const auto& [v, q] : law.outcomes) {
        if (q == 0) continue;
        next[pos + v] += w * q;
      }
    cur = std::move(next);
  }
  auto it = cur.find(s);
  return it == cur.end() ? Rational(0) : it->second;
}

double binomial_pmf(long long N, double P, long long j) {
  if (N < 0 || j < 0 || j > N) return 0.0;
  if (!(P >= 0.0 && P <= 1.0)) throw std::invalid_argument("P must lie in [0, 1]");
  if (P == 0.0) return j == 0 ? 1.0 : 0.0;
  if (P == 1.0) return j == N ? 1.0 : 0.0;
  double lg = std::lgamma(N + 1.0) - std::lgamma(j + 1.0) - std::lgamma(N - j + 1.0) +
              j * std::log(P) + (N - j) * std::log1p(-P);
  return std::exp(lg);
}

double binomial_tail_ge(long long N, double P, long long j) {
  if (j <= 0) return 1.0;
  if (j > N) return 0.0;
  if (!(P >= 0.0 && P <= 1.0)) throw std::invalid_argument("P must lie in [0, 1]");
  if (P == 0.0) return 0.0;
  if (P == 1.0) return 1.0;
  // Walk the pmf with term ratios from the starting point outward.
  double term = binomial_pmf(N, P, j);
  double total = term;
  for (long long k = j; k < N; ++k) {
    term *= (static_cast<double>(N - k) / (k + 1.0)) * (P / (1.0 - P));
    total += term;
    if (term < total * 1e-18) break;
  }
  return std::min(total, 1.0);
}

BigInt binomial_coefficient(long long N, long long k) {
  if (N < 0 || k < 0 || k > N) return 0;
  k = std::min(k, N - k);
  BigInt r = 1;
  for (long long i = 1; i <= k; ++i) {
    r *= (N - k + i);
    r /= i;
  }
  return r;
}

Rational binomial_pmf_exact(long long N, const Rational& P, long long j) {
  if (N < 0 || j < 0 || j > N) return 0;
  if (P < 0 || P > 1) throw std::invalid_argument("P must lie in [0, 1]");
  if (N > 5000) throw std::invalid_argument("binomial_pmf_exact: N too large");
  Rational q = 1 - P;
  Rational r = binomial_coefficient(N, j);
  for (long long i = 0; i < j; ++i) r *= P;
  for (long long i = 0; i < N - j; ++i) r *= q;
  return r;
}

Rational binomial_tail_ge_exact(long long N, const Rational& P, long long j) {
  if (j <= 0) return 1;
  if (j > N) return 0;
  Rational total = 0;
  for (long long k = j; k <= N; ++k) total += binomial_pmf_exact(N, P, k);
  return total;
}

BigInt double_factorial_odd(long long m) {
  if (m < -1 || m % 2 == 0) throw std::invalid_argument("need odd m >= -1");
  BigInt r = 1;
  for (long long k = 3; k <= m; k += 2) r *= k;
  return r;
}

namespace {

struct Enumerator {
  int n, d, stubs, npairs;
  bool condition_on_simple;
  std::vector<int> partner;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> keep_w, drop_w;  // p^r and (1-p)^r
  std::vector<double> sum_v0, sum_max;
  BigInt count = 0, simple = 0;

  void run() {
    recurse(0);
  }

  void recurse(int depth) {
    int s = -1;
    for (int i = 0; i < stubs; ++i)
      if (partner[i] < 0) {
        s = i;
        break;
      }
    if (s < 0) {
      leaf();
      return;
    }
    for (int u = s + 1; u < stubs; ++u) {
      if (partner[u] >= 0) continue;
      partner[s] = u;
      partner[u] = s;
      pairs[depth] = {s, u};
      recurse(depth + 1);
      partner[s] = -1;
      partner[u] = -1;
    }
  }

  bool pairing_is_simple() const {
    int codes[8];
    for (int i = 0; i < npairs; ++i) {
      int a = pairs[i].first / d, b = pairs[i].second / d;
      if (a == b) return false;  // loop
      codes[i] = std::min(a, b) * 16 + std::max(a, b);
    }
    for (int i = 0; i < npairs; ++i)
      for (int j = i + 1; j < npairs; ++j)
        if (codes[i] == codes[j]) return false;  // double edge
    return true;
  }

  void leaf() {
    ++count;
    bool is_simple = pairing_is_simple();
    if (is_simple) ++simple;
    if (condition_on_simple && !is_simple) return;

    for (unsigned mask = 0; mask < (1u << npairs); ++mask) {
      int par[16];
      for (int v = 0; v < 16; ++v) par[v] = v;
      auto find = [&](int v) {
        while (par[v] != v) {
          par[v] = par[par[v]];
          v = par[v];
        }
        return v;
      };
      for (int i = 0; i < npairs; ++i) {
        if (!(mask & (1u << i))) continue;
        int a = find(pairs[i].first / d), b = find(pairs[i].second / d);
        if (a != b) par[a] = b;
      }
      int size_of_root[16] = {0};
      for (int v = 0; v < n; ++v) ++size_of_root[find(v)];
      int c0 = size_of_root[find(0)];
      int cmax = 0;
      for (int v = 0; v < n; ++v) cmax = std::max(cmax, size_of_root[v]);
      int r = __builtin_popcount(mask);
      double w = keep_w[r] * drop_w[npairs - r];
      sum_v0[c0] += w;
      sum_max[cmax] += w;
    }
  }
};

}  // namespace

SmallGraphResult exhaustive_small_graph(int n, int d, double p, bool condition_on_simple) {
  if (n < 1 || d < 1) throw std::invalid_argument("need n >= 1 and d >= 1");
  long long stubs = static_cast<long long>(n) * d;
  if (stubs % 2 != 0) throw std::invalid_argument("n*d must be even");
  if (stubs > 14) throw std::invalid_argument("exhaustive enumeration restricted to n*d <= 14");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");

  Enumerator en;
  en.n = n;
  en.d = d;
  en.stubs = static_cast<int>(stubs);
  en.npairs = en.stubs / 2;
  en.condition_on_simple = condition_on_simple;
  en.partner.assign(en.stubs, -1);
  en.pairs.assign(en.npairs, {-1, -1});
  en.keep_w.assign(en.npairs + 1, 1.0);
  en.drop_w.assign(en.npairs + 1, 1.0);
  for (int i = 1; i <= en.npairs; ++i) {
    en.keep_w[i] = en.keep_w[i - 1] * p;
    en.drop_w[i] = en.drop_w[i - 1] * (1.0 - p);
  }
  en.sum_v0.assign(n + 1, 0.0);
  en.sum_max.assign(n + 1, 0.0);
  en.run();

  if (condition_on_simple && en.simple == 0)
    throw std::invalid_argument("no simple pairing exists at these parameters");

  SmallGraphResult out;
  out.pairings = en.count;
  out.simple_pairings = en.simple;
  out.p_simple = Rational(en.simple, en.count);
  double denom = static_cast<double>(condition_on_simple ? en.simple : en.count);
  for (int s = 1; s <= n; ++s) {
    if (en.sum_v0[s] > 0.0) out.comp_of_v0[s] = en.sum_v0[s] / denom;
    if (en.sum_max[s] > 0.0) out.comp_max[s] = en.sum_max[s] / denom;
  }
  return out;
}

double chi_square_gof(const std::map<long long, long long>& observed, long long trials,
                      const std::map<long long, double>& expected_probs,
                      double min_expect) {
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  long long total = 0;
  for (const auto& [k, c] : observed) {
    if (c < 0) throw std::invalid_argument("negative observed count");
    total += c;
    if (expected_probs.find(k) == expected_probs.end() && c > 0)
      return 0.0;  // saw an outcome the exact law forbids
  }
  if (total != trials) throw std::invalid_argument("observed counts do not sum to trials");

  // Pool support cells left to right until each pooled cell has enough mass.
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double acc_obs = 0.0, acc_exp = 0.0;
  for (const auto& [k, q] : expected_probs) {
    auto it = observed.find(k);
    acc_obs += it == observed.end() ? 0.0 : static_cast<double>(it->second);
    acc_exp += q * static_cast<double>(trials);
    if (acc_exp >= min_expect) {
      cells.emplace_back(acc_obs, acc_exp);
      acc_obs = acc_exp = 0.0;
    }
  }
  if (acc_exp > 0.0) {
    if (!cells.empty()) {
      cells.back().first += acc_obs;
      cells.back().second += acc_exp;
    } else {
      cells.emplace_back(acc_obs, acc_exp);
    }
  }
  if (cells.size() < 2) {
    // Degenerate law: everything in one cell. Either the data agrees or not.
    return (cells.size() == 1 && cells[0].first == static_cast<double>(trials)) ? 1.0 : 0.0;
  }
  double stat = 0.0;
  for (const auto& [obs, exp] : cells) stat += (obs - exp) * (obs - exp) / exp;
  return stats::chi_square_pvalue(stat, static_cast<int>(cells.size()) - 1);
}

}  // namespace regulus::oracle
