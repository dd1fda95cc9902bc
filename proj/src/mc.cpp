#include "regulus/mc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

#include "regulus/coupled_walks.hpp"
#include "regulus/detail/explore_core.hpp"
#include "regulus/matching.hpp"
#include "regulus/stats.hpp"
#include "regulus/theory.hpp"

namespace regulus::mc {

namespace {

using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Run `trials` independent Bernoulli trials and count hits. Trial i is a pure
// function of its index, so the split across threads cannot change the count.
template <class TrialFn>
long long count_hits(long long trials, int threads, const TrialFn& trial) {
  if (trials <= 0) throw std::invalid_argument("mc: trials must be positive");
  int nth = threads > 1 ? threads : 1;
  if (static_cast<long long>(nth) > trials) nth = static_cast<int>(trials);
  if (nth == 1) {
    detail::Workspace ws;
    long long hits = 0;
    for (long long i = 0; i < trials; ++i) hits += trial(i, ws) ? 1 : 0;
    return hits;
  }
  std::vector<long long> part(nth, 0);
  std::vector<std::exception_ptr> errs(nth);
  std::vector<std::thread> pool;
  pool.reserve(nth);
  for (int w = 0; w < nth; ++w) {
    pool.emplace_back([&, w] {
      try {
        detail::Workspace ws;
        const long long lo = trials * w / nth;
        const long long hi = trials * (w + 1) / nth;
        long long hits = 0;
        for (long long i = lo; i < hi; ++i) hits += trial(i, ws) ? 1 : 0;
        part[w] = hits;
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  long long hits = 0;
  for (long long v : part) hits += v;
  return hits;
}

stats::Interval make_interval(long long successes, long long trials, const RunOptions& opt) {
  if (!(opt.confidence > 0.0) || !(opt.confidence < 1.0))
    throw std::invalid_argument("mc: confidence must be in (0, 1)");
  if (opt.clopper_pearson)
    return stats::clopper_pearson(successes, trials, 1.0 - opt.confidence);
  return stats::wilson(successes, trials,
                       stats::normal_quantile(0.5 + opt.confidence / 2.0));
}

// Tracks the running retained-hit count of the current phase; a phase wins
// once that count plus the root clears the threshold. Gives up as soon as the
// vertices still carrying unseen stubs cannot lift any component over the
// threshold.
struct ThresholdVisitor {
  long long n = 0;
  double threshold = 0.0;
  long long cur_ur = 0;
  bool success = false;

  bool on_step(const detail::StepEvent& ev) {
    if (ev.phase_first) cur_ur = 0;
    if (ev.cls != HitClass::kActive && ev.retained) ++cur_ur;
    if (static_cast<double>(cur_ur) + 1.0 > threshold) {
      success = true;
      return false;
    }
    const long long reachable = cur_ur + 1 + (n - ev.vcnt[0]);
    return static_cast<double>(reachable) > threshold;
  }
  bool on_phase(const PhaseStats&, bool) { return true; }
};

Matching sample_simple_retained(const Params& params, RandomStream& rs) {
  Matching m = sample_matching(params, rs);
  while (!is_simple(m)) m = sample_matching(params, rs);
  return sample_mask(std::move(m), params.p, rs);
}

double resolve(const std::optional<double>& v, double dflt) { return v ? *v : dflt; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("lemma_audit: ") + what +
                                              " must be positive");
}

// Audits that index sums over [T] need the pairing to actually last T steps.
void require_within_pairing(long long T, long long n, int d) {
  if (T > n * static_cast<long long>(d) / 2)
    throw std::invalid_argument("lemma_audit: horizon exceeds the pairing length");
}

std::string json_dump(const json& j) { return j.dump(); }

json tail_to_json_obj(const TailEstimate& e, bool stable) {
  json j;
  j["d"] = e.d;
  j["n"] = e.n;
  j["p"] = e.p ? json(*e.p) : json(nullptr);
  j["lambda"] = e.lambda ? json(*e.lambda) : json(nullptr);
  j["A"] = e.A ? json(*e.A) : json(nullptr);
  j["mode"] = e.mode;
  j["simple"] = e.conditioned_simple;
  j["trials"] = e.trials;
  j["successes"] = e.successes;
  j["p_hat"] = e.p_hat;
  j["ci_lo"] = e.ci_lo;
  j["ci_hi"] = e.ci_hi;
  j["seed"] = e.seed;
  j["elapsed_s"] = stable ? 0.0 : e.elapsed_s;
  return j;
}

}  // namespace

TailEstimate run_tail(const Params& params, TailMode mode, bool conditioned_simple,
                      long long trials, std::uint64_t seed, const RunOptions& opt) {
  params.validate();
  double threshold;
  if (opt.threshold_override) {
    threshold = *opt.threshold_override;
    if (!(threshold > 0.0))
      throw std::invalid_argument("run_tail: threshold must be positive");
  } else {
    threshold = params.threshold();
  }

  const auto t0 = std::chrono::steady_clock::now();
  const long long n = params.n;
  const int d = params.d;
  const double p = params.p;

  auto trial = [&](long long i, detail::Workspace& ws) {
    RandomStream rs(seed, opt.stream_offset + static_cast<std::uint64_t>(i));
    ThresholdVisitor vis;
    vis.n = n;
    vis.threshold = threshold;
    ExploreOptions eo;
    if (mode == TailMode::kVertex) {
      eo.start = 0;
      eo.stop = StopRule::kFirstComponent;
    } else {
      eo.stop = StopRule::kFullGraph;
    }
    if (!conditioned_simple) {
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
    } else {
      Matching m = sample_simple_retained(params, rs);
      detail::FixedSource src;
      src.m = &m;
      detail::run_exploration(ws, n, d, src, eo, rs, vis);
    }
    return vis.success;
  };

  TailEstimate est;
  est.n = n;
  est.d = d;
  est.p = p;
  est.lambda = params.lambda;
  est.A = params.A;
  est.mode = mode == TailMode::kVertex ? "vertex" : "max";
  est.conditioned_simple = conditioned_simple;
  est.trials = trials;
  est.successes = count_hits(trials, opt.threads, trial);
  est.p_hat = static_cast<double>(est.successes) / static_cast<double>(trials);
  const auto iv = make_interval(est.successes, trials, opt);
  est.ci_lo = iv.lo;
  est.ci_hi = iv.hi;
  est.seed = seed;
  est.elapsed_s = seconds_since(t0);
  return est;
}

TailEstimate estimate_simple_prob(long long n, int d, long long trials, std::uint64_t seed,
                                  const RunOptions& opt) {
  Params pr = Params::with_p(n, d, 0.0);
  pr.validate();
  const auto t0 = std::chrono::steady_clock::now();

  auto trial = [&](long long i, detail::Workspace&) {
    RandomStream rs(seed, opt.stream_offset + static_cast<std::uint64_t>(i));
    return is_simple(sample_matching(pr, rs));
  };

  TailEstimate est;
  est.n = n;
  est.d = d;
  est.mode = "simple";
  est.trials = trials;
  est.successes = count_hits(trials, opt.threads, trial);
  est.p_hat = static_cast<double>(est.successes) / static_cast<double>(trials);
  const auto iv = make_interval(est.successes, trials, opt);
  est.ci_lo = iv.lo;
  est.ci_hi = iv.hi;
  est.seed = seed;
  est.elapsed_s = seconds_since(t0);
  return est;
}

std::vector<std::string> audit_events() {
  return {"fresh-count",       "mu-prime-sum",       "partial-unseen", "active-width",
          "active-nonfresh-sum", "retained-nonfresh-sum", "drift-gap"};
}

AuditReport lemma_audit(const std::string& event, const Params& params, long long trials,
                        const AuditTunables& tunables, std::uint64_t seed,
                        const RunOptions& opt) {
  params.validate();
  if (!params.A) throw std::invalid_argument("lemma_audit: window width A is required");
  const long long n = params.n;
  const int d = params.d;
  const double p = params.p;
  const double A = *params.A;
  const double sqn = std::sqrt(static_cast<double>(n));

  AuditReport rep;
  rep.event = event;
  rep.n = n;
  rep.d = d;
  rep.p = p;
  rep.lambda = params.lambda;
  rep.A = A;
  rep.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();

  auto finish = [&](auto&& trial) {
    if (rep.rhs >= 1.0) {
      rep.vacuous = true;
      rep.pass = true;
      rep.trials = 0;
    } else {
      rep.trials = trials;
      rep.exceedances = count_hits(trials, opt.threads, trial);
      rep.frequency = static_cast<double>(rep.exceedances) / static_cast<double>(trials);
      rep.se = std::sqrt(rep.frequency * (1.0 - rep.frequency) /
                         static_cast<double>(trials));
      rep.pass = rep.frequency <= rep.rhs + 3.0 * rep.se;
    }
    rep.elapsed_s = seconds_since(t0);
    return rep;
  };

  auto stream_for = [&](long long i) {
    return RandomStream(seed, opt.stream_offset + static_cast<std::uint64_t>(i));
  };

  if (event == "fresh-count") {
    const double m = resolve(tunables.m, fresh_slack(n, A));
    require_positive(m, "m");
    const long long T = horizon_upper(n, d, A);
    if (T < 2) throw std::invalid_argument("lemma_audit: horizon too short");
    require_within_pairing(T, n, d);
    rep.horizon = T;
    rep.tunables["m"] = m;
    rep.rhs = static_cast<double>(T) * std::exp(-m * sqn / static_cast<double>(T));
    struct Vis {
      long long n;
      double m;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        if (static_cast<double>(ev.fresh_after) > a_fresh(ev.t, n) + m) {
          exceeded = true;
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, m, T](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{n, m};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFullGraph;
      eo.step_cap = T - 1;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return vis.exceeded;
    });
  }

  if (event == "mu-prime-sum") {
    const double m = resolve(tunables.m, fresh_slack(n, A));
    const double h = resolve(tunables.h, fresh_slack(n, A));
    require_positive(m, "m");
    if (h < 1.0) throw theory::hypothesis_error("lemma_audit: mu-prime-sum needs h >= 1");
    const long long T = horizon_upper(n, d, A);
    if (T < 1) throw std::invalid_argument("lemma_audit: horizon too short");
    require_within_pairing(T, n, d);
    rep.horizon = T;
    rep.tunables["m"] = m;
    rep.tunables["h"] = h;
    rep.rhs = static_cast<double>(T) * std::exp(-h * sqn / static_cast<double>(T));
    const double floor_sum = theory::q_upper(T, p, d, n) - h;
    struct Vis {
      long long n;
      int d;
      double m;
      double floor_sum;
      RandomStream* rs;
      long long sum = 0;
      bool cleared = false;
      bool on_step(const detail::StepEvent& ev) {
        const double u = rs->unit();
        if (ev.retained && u > mu_cap(ev.t, n, d, m)) ++sum;
        if (static_cast<double>(sum) > floor_sum) {
          cleared = true;  // sum is nondecreasing, the low event is dead
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, m, h, T, floor_sum](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{n, d, m, floor_sum, &rs};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFullGraph;
      eo.step_cap = T;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return !vis.cleared;
    });
  }

  if (event == "partial-unseen") {
    const double l = resolve(tunables.l, fresh_slack(n, A));
    require_positive(l, "l");
    const long long T = horizon_lower(n, d, A);
    require_within_pairing(T, n, d);
    rep.horizon = T;
    rep.tunables["l"] = l;
    rep.rhs = static_cast<double>(T) * std::exp(-sqn * l / static_cast<double>(T));
    struct Vis {
      long long n;
      int d;
      double l;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        long long partial = 0;
        for (int mm = 1; mm <= d - 2; ++mm) partial += ev.vcnt[mm];
        const double ii = static_cast<double>(ev.t);
        if (static_cast<double>(partial) > ii * ii / static_cast<double>(n) + l) {
          exceeded = true;
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, l, T](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{n, d, l};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFullGraph;
      eo.step_cap = T;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return vis.exceeded;
    });
  }

  if (event == "active-width") {
    const long long T = horizon_lower(n, d, A);
    const double omega = resolve(tunables.omega, 3.0 * static_cast<double>(T) / (d - 1));
    require_positive(omega, "omega");
    if (omega > 3.0 * static_cast<double>(T) / (d - 1))
      throw theory::hypothesis_error("lemma_audit: active-width needs omega <= 3T/(d-1)");
    if (!(p > 0.0)) throw std::invalid_argument("lemma_audit: active-width needs p > 0");
    rep.horizon = T;
    rep.tunables["omega"] = omega;
    const double pd = p * (d - 1);
    rep.rhs = std::exp(-omega * omega / (4.0 * pd * static_cast<double>(T)) +
                       0.5 * omega * (1.0 - 1.0 / pd));
    struct Vis {
      double omega;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        if (static_cast<double>(ev.active_after) > omega) {
          exceeded = true;
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, omega, T](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{omega};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFirstComponent;
      eo.step_cap = T;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return vis.exceeded;
    });
  }

  if (event == "active-nonfresh-sum") {
    const long long T = horizon_lower(n, d, A);
    const double h = resolve(tunables.h, std::log(100.0 * static_cast<double>(T)));
    if (h < 1.0)
      throw theory::hypothesis_error("lemma_audit: active-nonfresh-sum needs h >= 1");
    rep.horizon = T;
    rep.tunables["h"] = h;
    rep.rhs = static_cast<double>(T) * std::exp(-h) + std::exp(-h * h);
    const double sqT = std::sqrt(static_cast<double>(T));
    struct Vis {
      long long n;
      int d;
      double h;
      double sqT;
      long long acc = 0;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        if (ev.cls == HitClass::kActive) ++acc;
        else if (ev.retained && ev.cls == HitClass::kPartial) ++acc;
        const double t = static_cast<double>(ev.t);
        const double nn = static_cast<double>(n);
        const double curve = 4.0 * t * t * t / (3.0 * d * nn * nn) +
                             (8.0 * sqT * t / nn + 1.0) * h;
        if (static_cast<double>(acc) > curve) {
          exceeded = true;
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, h, T, sqT](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{n, d, h, sqT};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFirstComponent;
      eo.step_cap = T;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return vis.exceeded;
    });
  }

  if (event == "retained-nonfresh-sum") {
    const double theta = resolve(tunables.theta, fresh_slack(n, A) / 2.0);
    require_positive(theta, "theta");
    const long long T = horizon_lower(n, d, A);
    require_within_pairing(T, n, d);
    rep.horizon = T;
    rep.tunables["theta"] = theta;
    rep.rhs = static_cast<double>(T) * std::exp(-sqn * theta / static_cast<double>(T));
    const double tt = static_cast<double>(T);
    const double nn = static_cast<double>(n);
    const double offset = 2.0 * tt * tt * tt / (nn * nn) + theta;
    struct Vis {
      double p;
      int d;
      double nn;
      double offset;
      long long acc = 0;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        if (ev.retained && ev.cls != HitClass::kFresh) ++acc;
        const double t = static_cast<double>(ev.t);
        const double curve = p * (1.0 - 2.0 / d) * t * t / (2.0 * nn) + offset;
        if (static_cast<double>(acc) > curve) {
          exceeded = true;
          return false;
        }
        return true;
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, theta, T, offset, nn](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Vis vis{p, d, nn, offset};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFullGraph;
      eo.step_cap = T;
      detail::run_exploration(ws, n, d, detail::LazySource{p}, eo, rs, vis);
      return vis.exceeded;
    });
  }

  if (event == "drift-gap") {
    const long long T = horizon_lower(n, d, A);
    rep.horizon = T;
    rep.rhs = static_cast<double>(T) *
              std::exp(-std::pow(static_cast<double>(n), 0.1));
    struct Vis {
      const Params* pr;
      long long walk;
      long long gap = 0;
      bool exceeded = false;
      bool on_step(const detail::StepEvent& ev) {
        const int d = pr->d;
        long long delta;
        switch (ev.cls) {
          case HitClass::kActive:
            delta = -2;
            gap += 1 + (ev.retained ? d - 1 : 0);
            break;
          case HitClass::kFresh:
            delta = (ev.retained ? d - 1 : 0) - 1;
            break;
          case HitClass::kOneShort:
            delta = (ev.retained ? d - 2 : 0) - 1;
            gap += ev.retained ? 1 : 0;
            break;
          default:  // partial
            delta = -1;
            gap += ev.retained ? d - 1 : 0;
            break;
        }
        walk += delta;
        const double curve = theory::q_lower_curve(static_cast<double>(ev.t), pr->p,
                                                   d, pr->n, *pr->A);
        if (static_cast<double>(gap) > curve) {
          exceeded = true;
          return false;
        }
        return walk > 0;  // the gap is only monitored while the walk survives
      }
      bool on_phase(const PhaseStats&, bool) { return true; }
    };
    return finish([&, T](long long i, detail::Workspace& ws) {
      RandomStream rs = stream_for(i);
      Matching m = sample_simple_retained(params, rs);
      Vis vis{&params, d};
      ExploreOptions eo;
      eo.start = 0;
      eo.stop = StopRule::kFirstComponent;
      eo.step_cap = T;
      detail::FixedSource src;
      src.m = &m;
      detail::run_exploration(ws, n, d, src, eo, rs, vis);
      return vis.exceeded;
    });
  }

  throw std::invalid_argument("lemma_audit: unknown event '" + event + "'");
}

ScalingReport scaling_diagnostic(int d, long long n, double lambda,
                                 const std::vector<double>& A_grid, long long trials,
                                 std::uint64_t seed, const RunOptions& opt) {
  if (A_grid.size() < 2)
    throw std::invalid_argument("scaling_diagnostic: need at least two grid points");
  for (std::size_t i = 0; i < A_grid.size(); ++i) {
    if (!(A_grid[i] > 0.0))
      throw std::invalid_argument("scaling_diagnostic: A must be positive");
    if (i > 0 && !(A_grid[i] > A_grid[i - 1]))
      throw std::invalid_argument("scaling_diagnostic: A grid must be strictly increasing");
  }

  ScalingReport rep;
  rep.d = d;
  rep.n = n;
  rep.lambda = lambda;
  rep.min_successes = std::numeric_limits<long long>::max();

  for (std::size_t k = 0; k < A_grid.size(); ++k) {
    Params pr = Params::with_lambda(n, d, lambda, A_grid[k]);
    RunOptions ro = opt;
    ro.stream_offset = opt.stream_offset +
                       static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(trials);
    ScalingPoint pt;
    pt.A = A_grid[k];
    pt.estimate = run_tail(pr, TailMode::kMax, false, trials, seed, ro);
    pt.flagged_low = pt.estimate.successes < 50;
    pt.g = theory::g_exponent(A_grid[k], lambda, d);
    pt.y = std::log(pt.estimate.p_hat) + 1.5 * std::log(A_grid[k]);
    rep.min_successes = std::min(rep.min_successes, pt.estimate.successes);
    rep.points.push_back(std::move(pt));
  }

  rep.monotone_decreasing = true;
  for (std::size_t k = 1; k < rep.points.size(); ++k)
    if (!(rep.points[k].estimate.p_hat < rep.points[k - 1].estimate.p_hat))
      rep.monotone_decreasing = false;

  std::vector<double> xs, ys;
  for (const auto& pt : rep.points) {
    if (pt.flagged_low) continue;
    xs.push_back(-pt.g);
    ys.push_back(pt.y);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() >= 2) {
    auto fit = stats::ols(xs.data(), ys.data(), static_cast<int>(xs.size()));
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.slope_se = fit.slope_se;
  } else {
    rep.slope = rep.intercept = rep.slope_se = nan;
  }
  const std::size_t half = xs.size() / 2;
  if (xs.size() - half >= 2) {
    auto fit = stats::ols(xs.data() + half, ys.data() + half,
                          static_cast<int>(xs.size() - half));
    rep.slope_upper_half = fit.slope;
  } else {
    rep.slope_upper_half = nan;
  }
  return rep;
}

std::string format_sig(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string tail_csv_header() {
  return "d,n,p,lambda,A,mode,simple,trials,successes,p_hat,ci_lo,ci_hi,seed,elapsed_s";
}

std::string tail_csv_row(const TailEstimate& e, bool stable) {
  std::ostringstream out;
  out << e.d << ',' << e.n << ',';
  if (e.p) out << format_sig(*e.p);
  out << ',';
  if (e.lambda) out << format_sig(*e.lambda);
  out << ',';
  if (e.A) out << format_sig(*e.A);
  out << ',' << e.mode << ',' << (e.conditioned_simple ? 1 : 0) << ',' << e.trials << ','
      << e.successes << ',' << format_sig(e.p_hat) << ',' << format_sig(e.ci_lo) << ','
      << format_sig(e.ci_hi) << ',' << e.seed << ','
      << format_sig(stable ? 0.0 : e.elapsed_s);
  return out.str();
}

std::string tail_json(const TailEstimate& e, bool stable) {
  return json_dump(tail_to_json_obj(e, stable));
}

namespace {

std::vector<std::string> split_csv(const std::string& row) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : row) {
    if (c == '\n' || c == '\r') break;
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("tail_from_csv_row: bad field ") + what);
  }
}

long long parse_ll(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("tail_from_csv_row: bad field ") + what);
  }
}

}  // namespace

TailEstimate tail_from_csv_row(const std::string& row) {
  const auto f = split_csv(row);
  if (f.size() != 14)
    throw std::invalid_argument("tail_from_csv_row: expected 14 fields");
  TailEstimate e;
  e.d = static_cast<int>(parse_ll(f[0], "d"));
  e.n = parse_ll(f[1], "n");
  if (!f[2].empty()) e.p = parse_double(f[2], "p");
  if (!f[3].empty()) e.lambda = parse_double(f[3], "lambda");
  if (!f[4].empty()) e.A = parse_double(f[4], "A");
  e.mode = f[5];
  e.conditioned_simple = parse_ll(f[6], "simple") != 0;
  e.trials = parse_ll(f[7], "trials");
  e.successes = parse_ll(f[8], "successes");
  e.p_hat = parse_double(f[9], "p_hat");
  e.ci_lo = parse_double(f[10], "ci_lo");
  e.ci_hi = parse_double(f[11], "ci_hi");
  e.seed = static_cast<std::uint64_t>(std::stoull(f[12]));
  e.elapsed_s = parse_double(f[13], "elapsed_s");
  return e;
}

TailEstimate tail_from_json(const std::string& text) {
  json j = json::parse(text);
  TailEstimate e;
  e.d = j.at("d").get<int>();
  e.n = j.at("n").get<long long>();
  if (!j.at("p").is_null()) e.p = j.at("p").get<double>();
  if (!j.at("lambda").is_null()) e.lambda = j.at("lambda").get<double>();
  if (!j.at("A").is_null()) e.A = j.at("A").get<double>();
  e.mode = j.at("mode").get<std::string>();
  e.conditioned_simple = j.at("simple").get<bool>();
  e.trials = j.at("trials").get<long long>();
  e.successes = j.at("successes").get<long long>();
  e.p_hat = j.at("p_hat").get<double>();
  e.ci_lo = j.at("ci_lo").get<double>();
  e.ci_hi = j.at("ci_hi").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.elapsed_s = j.at("elapsed_s").get<double>();
  return e;
}

std::string audit_csv_header() {
  return "event,d,n,p,lambda,A,horizon,trials,exceedances,frequency,rhs,se,vacuous,pass,"
         "seed,elapsed_s";
}

std::string audit_csv_row(const AuditReport& r, bool stable) {
  std::ostringstream out;
  out << r.event << ',' << r.d << ',' << r.n << ',' << format_sig(r.p) << ',';
  if (r.lambda) out << format_sig(*r.lambda);
  out << ',' << format_sig(r.A) << ',' << r.horizon << ',' << r.trials << ','
      << r.exceedances << ',' << format_sig(r.frequency) << ',' << format_sig(r.rhs) << ','
      << format_sig(r.se) << ',' << (r.vacuous ? 1 : 0) << ',' << (r.pass ? 1 : 0) << ','
      << r.seed << ',' << format_sig(stable ? 0.0 : r.elapsed_s);
  return out.str();
}

std::string audit_json(const AuditReport& r, bool stable) {
  json j;
  j["event"] = r.event;
  j["d"] = r.d;
  j["n"] = r.n;
  j["p"] = r.p;
  j["lambda"] = r.lambda ? json(*r.lambda) : json(nullptr);
  j["A"] = r.A;
  j["horizon"] = r.horizon;
  j["trials"] = r.trials;
  j["exceedances"] = r.exceedances;
  j["frequency"] = r.frequency;
  j["rhs"] = r.rhs;
  j["se"] = r.se;
  j["vacuous"] = r.vacuous;
  j["pass"] = r.pass;
  j["tunables"] = json::object();
  for (const auto& [k, v] : r.tunables) j["tunables"][k] = v;
  j["seed"] = r.seed;
  j["elapsed_s"] = stable ? 0.0 : r.elapsed_s;
  return json_dump(j);
}

AuditReport audit_from_json(const std::string& text) {
  json j = json::parse(text);
  AuditReport r;
  r.event = j.at("event").get<std::string>();
  r.d = j.at("d").get<int>();
  r.n = j.at("n").get<long long>();
  r.p = j.at("p").get<double>();
  if (!j.at("lambda").is_null()) r.lambda = j.at("lambda").get<double>();
  r.A = j.at("A").get<double>();
  r.horizon = j.at("horizon").get<long long>();
  r.trials = j.at("trials").get<long long>();
  r.exceedances = j.at("exceedances").get<long long>();
  r.frequency = j.at("frequency").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.se = j.at("se").get<double>();
  r.vacuous = j.at("vacuous").get<bool>();
  r.pass = j.at("pass").get<bool>();
  for (const auto& [k, v] : j.at("tunables").items())
    r.tunables[k] = v.get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.elapsed_s = j.at("elapsed_s").get<double>();
  return r;
}

std::string scaling_json(const ScalingReport& r, bool stable) {
  json j;
  j["d"] = r.d;
  j["n"] = r.n;
  j["lambda"] = r.lambda;
  j["points"] = json::array();
  for (const auto& pt : r.points) {
    json q;
    q["A"] = pt.A;
    q["g"] = pt.g;
    q["y"] = pt.y;
    q["flagged_low"] = pt.flagged_low;
    q["estimate"] = tail_to_json_obj(pt.estimate, stable);
    j["points"].push_back(std::move(q));
  }
  j["monotone_decreasing"] = r.monotone_decreasing;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["slope_se"] = r.slope_se;
  j["slope_upper_half"] = r.slope_upper_half;
  j["min_successes"] = r.min_successes;
  return json_dump(j);
}

}  // namespace regulus::mc
