// Command line front end. Machine-readable output (CSV or JSON) goes to
// stdout or --out; a short human summary goes to stderr. Exit codes:
//   0  success
//   2  a verification or audit reported a violation
//   64 usage error
//   65 infeasible or out-of-domain parameters
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "regulus/coupled_walks.hpp"
#include "regulus/exploration.hpp"
#include "regulus/matching.hpp"
#include "regulus/mc.hpp"
#include "regulus/oracles.hpp"
#include "regulus/params.hpp"
#include "regulus/random.hpp"
#include "regulus/stats.hpp"
#include "regulus/theory.hpp"

namespace {

using nlohmann::ordered_json;
using namespace regulus;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInfeasible = 65;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Round to the 12 significant digits used everywhere in machine output, so
// the JSON number matches the CSV text.
ordered_json num(double v) {
  if (!std::isfinite(v)) return ordered_json();
  return std::stod(mc::format_sig(v));
}

int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Destination for machine output.
struct Sink {
  std::string path;
  std::ofstream file;

  std::ostream& open() {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
  }
};

// Shared model flags. Exactly one of --p / --lambda selects the retention
// probability; --lambda routes through the critical window.
struct ModelOpts {
  long long n = 0;
  int d = 0;
  double p = 0.0;
  double lambda = 0.0;
  double A = 0.0;
  CLI::Option* p_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* A_opt = nullptr;

  void add_to(CLI::App* sub, bool with_A) {
    sub->add_option("--n", n, "number of vertices")->required();
    sub->add_option("--d", d, "degree")->required();
    p_opt = sub->add_option("--p", p, "bond retention probability");
    lambda_opt = sub->add_option("--lambda", lambda,
                                 "window location; p = (1 + lambda n^{-1/3})/(d-1)");
    p_opt->excludes(lambda_opt);
    lambda_opt->excludes(p_opt);
    if (with_A) A_opt = sub->add_option("--A", A, "window width parameter A");
  }

  Params resolve() const {
    std::optional<double> a;
    if (A_opt != nullptr && A_opt->count() > 0) a = A;
    if (p_opt->count() > 0) return Params::with_p(n, d, p, a);
    if (lambda_opt->count() > 0) {
      Params pr = Params::with_p(n, d, critical_p(n, d, lambda), a);
      pr.lambda = lambda;
      return pr;
    }
    throw usage_error("exactly one of --p or --lambda is required");
  }
};

void emit_op(Sink& sink, const std::string& op, const ordered_json& args,
             const ordered_json& value) {
  ordered_json out;
  out["op"] = op;
  out["args"] = args;
  out["value"] = value;
  sink.open() << out.dump() << "\n";
}

// Law strings look like "1:1/2,-1:1/2" or "2:0.25,0:0.5,-2:0.25". A prob
// containing '/' is read as an exact integer fraction, otherwise as a
// decimal whose binary value is converted exactly.
oracle::Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    oracle::BigInt num(s.substr(0, slash));
    oracle::BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("law probability has zero denominator");
    return oracle::Rational(num, den);
  }
  return oracle::Rational(std::stod(s));
}

oracle::StepLaw parse_law(const std::string& text) {
  oracle::StepLaw law;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("law entry needs the form value:prob, got " + item);
    law.outcomes.emplace_back(std::stoll(item.substr(0, colon)),
                              parse_rational(item.substr(colon + 1)));
  }
  law.validate();
  return law;
}

theory::StepLawReal to_real(const oracle::StepLaw& law) {
  theory::StepLawReal out;
  for (const auto& [v, q] : law.outcomes)
    out.outcomes.emplace_back(v, q.convert_to<double>());
  return out;
}

std::string rational_str(const oracle::Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

StopRule parse_stop(const std::string& s) {
  if (s == "first") return StopRule::kFirstComponent;
  if (s == "full") return StopRule::kFullGraph;
  throw usage_error("unknown stop rule: " + s);
}

ActivePolicy parse_policy(const std::string& s) {
  if (s == "fifo") return ActivePolicy::kFifo;
  if (s == "lifo") return ActivePolicy::kLifo;
  throw usage_error("unknown active policy: " + s);
}

ordered_json params_json(const Params& pr) {
  ordered_json j;
  j["n"] = pr.n;
  j["d"] = pr.d;
  j["p"] = num(pr.p);
  j["lambda"] = pr.lambda ? ordered_json(num(*pr.lambda)) : ordered_json();
  j["A"] = pr.A ? ordered_json(num(*pr.A)) : ordered_json();
  return j;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const ModelOpts& mo, std::uint64_t seed, const std::string& stop,
                 const std::string& policy, CLI::Option* start_opt, long long start,
                 CLI::Option* cap_opt, long long cap, bool fixed, bool simple,
                 bool check, bool phases, const std::string& trace_path, Sink& sink) {
  Params pr = mo.resolve();
  RandomStream rs(seed, 0);
  ExploreOptions eo;
  eo.stop = parse_stop(stop);
  eo.policy = parse_policy(policy);
  if (start_opt->count() > 0) eo.start = start;
  if (cap_opt->count() > 0) eo.step_cap = cap;

  ExplorationTrace tr;
  if (fixed || simple) {
    Matching m = sample_matching(pr, rs);
    while (simple && !is_simple(m)) m = sample_matching(pr, rs);
    m = sample_mask(std::move(m), pr.p, rs);
    tr = explore(m, eo, rs);
  } else {
    tr = explore(pr, eo, rs);
  }

  IdentityReport rep;
  if (check) rep = check_counter_identities(tr);

  if (!trace_path.empty()) {
    std::ofstream f(trace_path);
    if (!f) throw std::runtime_error("cannot open trace file: " + trace_path);
    write_trace_csv(f, tr);
  }

  ordered_json out;
  out["op"] = "simulate";
  ordered_json args = params_json(pr);
  args["seed"] = seed;
  args["stop"] = stop;
  args["policy"] = policy;
  args["start"] = tr.start_vertex;
  args["fixed"] = fixed || simple;
  args["simple"] = simple;
  out["args"] = args;
  out["steps"] = static_cast<long long>(tr.steps.size());
  out["truncated"] = tr.truncated;
  out["phase_count"] = static_cast<long long>(tr.phases.size());
  if (eo.stop == StopRule::kFirstComponent && !tr.truncated)
    out["component_of_start"] = component_size_of_start(tr);
  if (eo.stop == StopRule::kFullGraph && !tr.truncated)
    out["max_component"] = max_component_size(tr);
  if (phases) {
    ordered_json arr = ordered_json::array();
    for (const auto& ph : tr.phases) {
      ordered_json row;
      row["root"] = ph.root_vertex;
      row["first_step"] = ph.first_step;
      row["last_step"] = ph.last_step;
      row["component_size"] = ph.component_size();
      row["closed"] = ph.closed;
      arr.push_back(row);
    }
    out["phases"] = arr;
  }
  if (check) {
    out["identities_pass"] = rep.pass;
    if (!rep.pass) {
      out["failure"] = rep.failure;
      out["failure_step"] = rep.step;
    }
  }
  sink.open() << out.dump() << "\n";
  std::cerr << "simulate: " << tr.steps.size() << " steps, "
            << tr.phases.size() << " phase(s)"
            << (check ? (rep.pass ? ", identities ok" : ", IDENTITY VIOLATION") : "")
            << "\n";
  return (check && !rep.pass) ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percolation laboratory for random regular graphs"};
  app.require_subcommand(1);
  std::function<int()> action;

  Sink sink;
  app.add_option("--out", sink.path, "write machine output to this file instead of stdout");

  // ------------------------------------------------------------- simulate
  auto* sim = app.add_subcommand("simulate", "run one exploration and summarize it");
  ModelOpts sim_mo;
  sim_mo.add_to(sim, true);
  std::uint64_t sim_seed = 1;
  sim->add_option("--seed", sim_seed, "master seed")->envname("REGULUS_SEED");
  std::string sim_stop = "first", sim_policy = "fifo", sim_trace;
  sim->add_option("--stop", sim_stop, "stop rule")->check(CLI::IsMember({"first", "full"}));
  sim->add_option("--policy", sim_policy, "active set discipline")
      ->check(CLI::IsMember({"fifo", "lifo"}));
  long long sim_start = 0, sim_cap = 0;
  auto* sim_start_opt = sim->add_option("--start", sim_start, "start vertex (default random)");
  auto* sim_cap_opt = sim->add_option("--cap", sim_cap, "step cap");
  bool sim_fixed = false, sim_simple = false, sim_check = false, sim_phases = false;
  sim->add_flag("--fixed", sim_fixed, "sample the whole pairing up front and replay it");
  sim->add_flag("--simple", sim_simple, "condition the pairing on simplicity (implies --fixed)");
  sim->add_flag("--check", sim_check, "recompute all counter identities over the trace");
  sim->add_flag("--phases", sim_phases, "include the per-phase table in the output");
  sim->add_option("--dump-trace", sim_trace, "write the per-step CSV trace to this file");
  sim->callback([&] {
    action = [&] {
      return run_simulate(sim_mo, sim_seed, sim_stop, sim_policy, sim_start_opt, sim_start,
                          sim_cap_opt, sim_cap, sim_fixed, sim_simple, sim_check, sim_phases,
                          sim_trace, sink);
    };
  });

  // ----------------------------------------------------------------- tail
  auto* tail = app.add_subcommand("tail", "estimate a component-size tail probability");
  ModelOpts tail_mo;
  tail_mo.add_to(tail, true);
  double tail_threshold = 0.0;
  auto* tail_thr_opt =
      tail->add_option("--threshold", tail_threshold, "raw size threshold (alternative to --A)");
  if (tail_mo.A_opt != nullptr) {
    tail_mo.A_opt->excludes(tail_thr_opt);
    tail_thr_opt->excludes(tail_mo.A_opt);
  }
  std::string tail_mode = "vertex";
  tail->add_option("--mode", tail_mode, "vertex: component of a fixed vertex; max: largest")
      ->check(CLI::IsMember({"vertex", "max"}));
  bool tail_simple = false;
  tail->add_flag("--simple", tail_simple, "condition on the pairing being simple");
  long long tail_trials = 10000;
  tail->add_option("--trials", tail_trials, "Monte Carlo trials");
  std::uint64_t tail_seed = 1;
  tail->add_option("--seed", tail_seed, "master seed")->envname("REGULUS_SEED");
  int tail_threads = default_threads();
  tail->add_option("--threads", tail_threads, "worker threads");
  bool tail_cp = false, tail_json_flag = false, tail_stable = false, tail_nohdr = false;
  double tail_conf = 0.95;
  tail->add_flag("--clopper-pearson", tail_cp, "exact interval instead of Wilson");
  tail->add_option("--confidence", tail_conf, "two-sided confidence level");
  tail->add_flag("--json", tail_json_flag, "emit JSON instead of CSV");
  tail->add_flag("--stable-output", tail_stable, "zero the elapsed time field");
  tail->add_flag("--no-header", tail_nohdr, "omit the CSV header row");
  std::uint64_t tail_offset = 0;
  tail->add_option("--stream-offset", tail_offset, "offset added to per-trial stream ids");
  tail->callback([&] {
    action = [&] {
      if (tail_mo.A_opt->count() == 0 && tail_thr_opt->count() == 0)
        throw usage_error("tail needs exactly one of --A or --threshold");
      Params pr = tail_mo.resolve();
      mc::RunOptions ro;
      ro.threads = tail_threads;
      ro.clopper_pearson = tail_cp;
      ro.confidence = tail_conf;
      ro.stream_offset = tail_offset;
      if (tail_thr_opt->count() > 0) ro.threshold_override = tail_threshold;
      auto mode = tail_mode == "max" ? mc::TailMode::kMax : mc::TailMode::kVertex;
      mc::TailEstimate est = mc::run_tail(pr, mode, tail_simple, tail_trials, tail_seed, ro);
      std::ostream& os = sink.open();
      if (tail_json_flag) {
        os << mc::tail_json(est, tail_stable) << "\n";
      } else {
        if (!tail_nohdr) os << mc::tail_csv_header() << "\n";
        os << mc::tail_csv_row(est, tail_stable) << "\n";
      }
      std::cerr << "tail " << tail_mode << ": p_hat = " << mc::format_sig(est.p_hat)
                << " [" << mc::format_sig(est.ci_lo) << ", " << mc::format_sig(est.ci_hi)
                << "] from " << est.trials << " trials in "
                << mc::format_sig(est.elapsed_s) << " s\n";
      return kExitOk;
    };
  });

  // --------------------------------------------------------------- theory
  auto* th = app.add_subcommand("theory", "evaluate closed-form bounds and exponents");
  th->require_subcommand(1);

  auto variant_of = [](const std::string& s) {
    return s == "abstract" ? theory::ExponentVariant::kAbstract
                           : theory::ExponentVariant::kHeadline;
  };

  {
    auto* c = th->add_subcommand("g-exponent", "decay exponent of the upper tail");
    auto st = std::make_shared<std::tuple<double, double, int, std::string>>(0.0, 0.0, 0,
                                                                             "headline");
    c->add_option("--A", std::get<0>(*st))->required();
    c->add_option("--lambda", std::get<1>(*st))->required();
    c->add_option("--d", std::get<2>(*st))->required();
    c->add_option("--variant", std::get<3>(*st))->check(CLI::IsMember({"headline", "abstract"}));
    c->callback([&, st] {
      action = [&, st] {
        auto [A, lambda, d, var] = *st;
        double v = theory::g_exponent(A, lambda, d, variant_of(var));
        emit_op(sink, "g-exponent",
                {{"A", num(A)}, {"lambda", num(lambda)}, {"d", d}, {"variant", var}}, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("envelope", "full closed-form tail envelope");
    struct EnvArgs {
      double A = 0, lambda = 0, c = 1.0;
      long long n = 0;
      int d = 0;
      std::string scale = "max", variant = "headline";
    };
    auto st = std::make_shared<EnvArgs>();
    c->add_option("--A", st->A)->required();
    c->add_option("--lambda", st->lambda)->required();
    c->add_option("--n", st->n)->required();
    c->add_option("--d", st->d)->required();
    c->add_option("--c", st->c, "leading constant");
    c->add_option("--scale", st->scale)->check(CLI::IsMember({"vertex", "max"}));
    c->add_option("--variant", st->variant)->check(CLI::IsMember({"headline", "abstract"}));
    c->callback([&, st] {
      action = [&, st] {
        auto mode = st->scale == "vertex" ? theory::EnvelopeMode::kVertex
                                          : theory::EnvelopeMode::kMax;
        double v = theory::envelope(st->A, st->n, st->d, st->lambda, mode, st->c,
                                    variant_of(st->variant));
        emit_op(sink, "envelope",
                {{"A", num(st->A)},
                 {"lambda", num(st->lambda)},
                 {"n", st->n},
                 {"d", st->d},
                 {"c", num(st->c)},
                 {"scale", st->scale},
                 {"variant", st->variant}},
                num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("q-upper", "quadratic envelope for the capped fresh sum");
    auto mo = std::make_shared<ModelOpts>();
    mo->add_to(c, false);
    auto T = std::make_shared<long long>(0);
    c->add_option("--T", *T, "horizon")->required();
    c->callback([&, mo, T] {
      action = [&, mo, T] {
        Params pr = mo->resolve();
        double v = theory::q_upper(*T, pr.p, pr.d, pr.n);
        ordered_json args = params_json(pr);
        args["T"] = *T;
        emit_op(sink, "q-upper", args, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("q-lower", "lower drift curve at a given step");
    auto mo = std::make_shared<ModelOpts>();
    mo->add_to(c, true);
    auto t = std::make_shared<long long>(0);
    c->add_option("--t", *t, "step")->required();
    c->callback([&, mo, t] {
      action = [&, mo, t] {
        Params pr = mo->resolve();
        if (!pr.A) throw usage_error("q-lower needs --A");
        double v = theory::q_lower_curve(*t, pr.p, pr.d, pr.n, *pr.A);
        ordered_json args = params_json(pr);
        args["t"] = *t;
        emit_op(sink, "q-lower", args, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("ballot-generic", "ballot-style bound for a lattice walk");
    struct BArgs {
      long long t = 0, k = 0, h = 0;
      std::string law;
    };
    auto st = std::make_shared<BArgs>();
    c->add_option("--t", st->t, "steps")->required();
    c->add_option("--k", st->k, "terminal value")->required();
    c->add_option("--start", st->h, "start height")->required();
    c->add_option("--law", st->law, "step law, e.g. 1:1/2,-1:1/2")->required();
    c->callback([&, st] {
      action = [&, st] {
        auto law = to_real(parse_law(st->law));
        double v = theory::ballot_bound_generic(st->t, st->k, st->h, law);
        emit_op(sink, "ballot-generic",
                {{"t", st->t}, {"k", st->k}, {"start", st->h}, {"law", st->law}}, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("ballot-regular", "ballot-style bound for the percolation walk");
    struct BArgs {
      long long t = 0, k = 0;
      int d = 0;
      double p = 0;
    };
    auto st = std::make_shared<BArgs>();
    c->add_option("--t", st->t)->required();
    c->add_option("--k", st->k)->required();
    c->add_option("--d", st->d)->required();
    c->add_option("--p", st->p)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::ballot_bound_regular(st->t, st->k, st->d, st->p);
        emit_op(sink, "ballot-regular",
                {{"t", st->t}, {"k", st->k}, {"d", st->d}, {"p", num(st->p)}}, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("point-bound", "local limit style binomial point bound");
    struct PArgs {
      long long N = 0;
      double P = 0, x = 0;
    };
    auto st = std::make_shared<PArgs>();
    c->add_option("--N", st->N)->required();
    c->add_option("--P", st->P)->required();
    c->add_option("--x", st->x)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::binomial_point_bound(st->N, st->P, st->x);
        emit_op(sink, "point-bound", {{"N", st->N}, {"P", num(st->P)}, {"x", num(st->x)}},
                num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("chernoff", "upper tail bound for a binomial");
    struct PArgs {
      long long N = 0;
      double P = 0, x = 0;
    };
    auto st = std::make_shared<PArgs>();
    c->add_option("--N", st->N)->required();
    c->add_option("--P", st->P)->required();
    c->add_option("--x", st->x)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::chernoff_bound(st->N, st->P, st->x);
        emit_op(sink, "chernoff", {{"N", st->N}, {"P", num(st->P)}, {"x", num(st->x)}}, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("reflection", "reflected Gaussian transition density");
    struct RArgs {
      double x = 0, y = 0, mu = 0, t = 0, z = 0;
    };
    auto st = std::make_shared<RArgs>();
    c->add_option("--x", st->x, "start height")->required();
    c->add_option("--y", st->y, "barrier intercept; the barrier is the line y + mu s")->required();
    c->add_option("--mu", st->mu, "barrier slope")->required();
    c->add_option("--t", st->t)->required();
    c->add_option("--z", st->z, "endpoint the density is evaluated at")->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::reflection_density(st->x, st->y, st->mu, st->t, st->z);
        emit_op(sink, "reflection",
                {{"x", num(st->x)},
                 {"y", num(st->y)},
                 {"mu", num(st->mu)},
                 {"t", num(st->t)},
                 {"z", num(st->z)}},
                num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("tilt-nu", "drift of the tilted comparison walk");
    struct TArgs {
      long long t_prime = 0, n = 0;
      double p = 0;
      int d = 0;
    };
    auto st = std::make_shared<TArgs>();
    c->add_option("--t-prime", st->t_prime)->required();
    c->add_option("--n", st->n)->required();
    c->add_option("--p", st->p)->required();
    c->add_option("--d", st->d)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::tilt_nu(st->t_prime, st->n, st->p, st->d);
        emit_op(sink, "tilt-nu",
                {{"t_prime", st->t_prime}, {"n", st->n}, {"p", num(st->p)}, {"d", st->d}},
                num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("tilt-gamma", "variance proxy of the tilted walk");
    struct TArgs {
      double p = 0;
      int d = 0;
    };
    auto st = std::make_shared<TArgs>();
    c->add_option("--p", st->p)->required();
    c->add_option("--d", st->d)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::tilt_gamma(st->p, st->d);
        emit_op(sink, "tilt-gamma", {{"p", num(st->p)}, {"d", st->d}}, num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("x-offset", "terminal offset of the comparison walk");
    struct XArgs {
      long long k = 0, T = 0, n = 0;
      double lambda = 0;
      int d = 0;
    };
    auto st = std::make_shared<XArgs>();
    c->add_option("--k", st->k)->required();
    c->add_option("--lambda", st->lambda)->required();
    c->add_option("--T", st->T)->required();
    c->add_option("--d", st->d)->required();
    c->add_option("--n", st->n)->required();
    c->callback([&, st] {
      action = [&, st] {
        double v = theory::x_offset(st->k, st->lambda, st->T, st->d, st->n);
        emit_op(sink, "x-offset",
                {{"k", st->k},
                 {"lambda", num(st->lambda)},
                 {"T", st->T},
                 {"d", st->d},
                 {"n", st->n}},
                num(v));
        return kExitOk;
      };
    });
  }
  {
    auto* c = th->add_subcommand("geometry", "piecewise-linear barrier geometry");
    struct GArgs {
      double A = 0, eps = 0.1, lambda = 0;
      long long n = 0;
      int d = 0;
    };
    auto st = std::make_shared<GArgs>();
    c->add_option("--A", st->A)->required();
    c->add_option("--n", st->n)->required();
    c->add_option("--d", st->d)->required();
    c->add_option("--eps", st->eps);
    c->add_option("--lambda", st->lambda);
    c->callback([&, st] {
      action = [&, st] {
        theory::BrownianGeometry g =
            theory::brownian_geometry(st->A, st->n, st->d, st->eps, st->lambda);
        ordered_json v;
        v["T"] = num(g.T);
        v["t_prime"] = num(g.t_prime);
        v["t_second"] = num(g.t_second);
        v["terminal"] = num(g.terminal);
        v["mid_lo"] = num(g.mid_band.lo);
        v["mid_hi"] = num(g.mid_band.hi);
        v["end_lo"] = num(g.end_band.lo);
        v["end_hi"] = num(g.end_band.hi);
        emit_op(sink, "geometry",
                {{"A", num(st->A)},
                 {"n", st->n},
                 {"d", st->d},
                 {"eps", num(st->eps)},
                 {"lambda", num(st->lambda)}},
                v);
        return kExitOk;
      };
    });
  }

  // --------------------------------------------------------------- oracle
  auto* orc = app.add_subcommand("oracle", "exact reference computations");
  orc->require_subcommand(1);

  {
    auto* c = orc->add_subcommand("walk-stay", "probability a lattice walk stays positive");
    struct WArgs {
      long long t = 0, start = 0, end_at = 0, barrier = 0;
      std::string law;
    };
    auto st = std::make_shared<WArgs>();
    c->add_option("--t", st->t)->required();
    c->add_option("--start", st->start)->required();
    c->add_option("--law", st->law)->required();
    auto* end_opt = c->add_option("--end-at", st->end_at, "also pin the terminal value");
    c->add_option("--barrier", st->barrier, "stay strictly above this level");
    c->callback([&, st, end_opt] {
      action = [&, st, end_opt] {
        auto law = parse_law(st->law);
        std::optional<long long> end;
        if (end_opt->count() > 0) end = st->end_at;
        oracle::WalkProbability w =
            oracle::walk_stay_positive(st->t, st->start, law, end, st->barrier);
        ordered_json args{{"t", st->t},
                          {"start", st->start},
                          {"law", st->law},
                          {"barrier", st->barrier}};
        if (end) args["end_at"] = *end;
        ordered_json v;
        v["value"] = num(w.value);
        v["exact_mode"] = w.exact_mode;
        if (w.exact_mode) v["rational"] = rational_str(w.exact);
        emit_op(sink, "walk-stay", args, v);
        return kExitOk;
      };
    });
  }
  {
    auto* c = orc->add_subcommand("walk-point", "exact point mass of a lattice walk sum");
    struct WArgs {
      long long t = 0, s = 0;
      std::string law;
    };
    auto st = std::make_shared<WArgs>();
    c->add_option("--t", st->t)->required();
    c->add_option("--s", st->s, "terminal sum")->required();
    c->add_option("--law", st->law)->required();
    c->callback([&, st] {
      action = [&, st] {
        auto law = parse_law(st->law);
        oracle::Rational q = oracle::walk_sum_point(st->t, law, st->s);
        ordered_json v;
        v["value"] = num(q.convert_to<double>());
        v["rational"] = rational_str(q);
        emit_op(sink, "walk-point", {{"t", st->t}, {"s", st->s}, {"law", st->law}}, v);
        return kExitOk;
      };
    });
  }
  {
    auto* c = orc->add_subcommand("binomial-pmf", "binomial point mass");
    struct BArgs {
      long long N = 0, j = 0;
      std::string P;
    };
    auto st = std::make_shared<BArgs>();
    c->add_option("--N", st->N)->required();
    c->add_option("--j", st->j)->required();
    c->add_option("--P", st->P, "success probability, decimal or a/b")->required();
    c->callback([&, st] {
      action = [&, st] {
        oracle::Rational P = parse_rational(st->P);
        oracle::Rational q = oracle::binomial_pmf_exact(st->N, P, st->j);
        ordered_json v;
        v["value"] = num(q.convert_to<double>());
        v["rational"] = rational_str(q);
        emit_op(sink, "binomial-pmf", {{"N", st->N}, {"j", st->j}, {"P", st->P}}, v);
        return kExitOk;
      };
    });
  }
  {
    auto* c = orc->add_subcommand("binomial-tail", "binomial upper tail P[X >= j]");
    struct BArgs {
      long long N = 0, j = 0;
      std::string P;
    };
    auto st = std::make_shared<BArgs>();
    c->add_option("--N", st->N)->required();
    c->add_option("--j", st->j)->required();
    c->add_option("--P", st->P)->required();
    c->callback([&, st] {
      action = [&, st] {
        oracle::Rational P = parse_rational(st->P);
        oracle::Rational q = oracle::binomial_tail_ge_exact(st->N, P, st->j);
        ordered_json v;
        v["value"] = num(q.convert_to<double>());
        v["rational"] = rational_str(q);
        emit_op(sink, "binomial-tail", {{"N", st->N}, {"j", st->j}, {"P", st->P}}, v);
        return kExitOk;
      };
    });
  }
  {
    auto* c = orc->add_subcommand("pairings", "count of stub pairings, (dn-1)!!");
    struct PArgs {
      long long n = 0;
      int d = 0;
    };
    auto st = std::make_shared<PArgs>();
    c->add_option("--n", st->n)->required();
    c->add_option("--d", st->d)->required();
    c->callback([&, st] {
      action = [&, st] {
        long long s = st->n * st->d;
        if (s <= 0 || s % 2 != 0)
          throw std::invalid_argument("n*d must be positive and even");
        oracle::BigInt v = oracle::double_factorial_odd(s - 1);
        emit_op(sink, "pairings", {{"n", st->n}, {"d", st->d}}, v.str());
        return kExitOk;
      };
    });
  }
  {
    auto* c = orc->add_subcommand("exhaustive", "exact laws on a tiny graph by enumeration");
    struct EArgs {
      long long n = 0;
      int d = 0;
      double p = 0;
      bool simple = false;
    };
    auto st = std::make_shared<EArgs>();
    c->add_option("--n", st->n)->required();
    c->add_option("--d", st->d)->required();
    c->add_option("--p", st->p)->required();
    c->add_flag("--simple", st->simple, "condition on the pairing being simple");
    c->callback([&, st] {
      action = [&, st] {
        oracle::SmallGraphResult r =
            oracle::exhaustive_small_graph(st->n, st->d, st->p, st->simple);
        ordered_json v;
        ordered_json v0 = ordered_json::object(), vmax = ordered_json::object();
        for (const auto& [k, pr] : r.comp_of_v0) v0[std::to_string(k)] = num(pr);
        for (const auto& [k, pr] : r.comp_max) vmax[std::to_string(k)] = num(pr);
        v["component_of_v0"] = v0;
        v["component_max"] = vmax;
        v["p_simple"] = num(r.p_simple.convert_to<double>());
        v["p_simple_rational"] = rational_str(r.p_simple);
        v["pairings"] = r.pairings.str();
        v["simple_pairings"] = r.simple_pairings.str();
        emit_op(sink, "exhaustive",
                {{"n", st->n}, {"d", st->d}, {"p", num(st->p)}, {"simple", st->simple}}, v);
        return kExitOk;
      };
    });
  }

  // --------------------------------------------------------------- verify
  auto* ver = app.add_subcommand("verify", "randomized checks of the internal invariants");
  ver->require_subcommand(1);

  {
    auto* c = ver->add_subcommand("identities",
                                  "recompute every counter identity over fresh traces");
    auto mo = std::make_shared<ModelOpts>();
    mo->add_to(c, false);
    struct VArgs {
      long long trials = 100;
      std::uint64_t seed = 1;
      std::string stop = "full", policy = "fifo";
      bool fixed = false;
    };
    auto st = std::make_shared<VArgs>();
    c->add_option("--trials", st->trials);
    c->add_option("--seed", st->seed)->envname("REGULUS_SEED");
    c->add_option("--stop", st->stop)->check(CLI::IsMember({"first", "full"}));
    c->add_option("--policy", st->policy)->check(CLI::IsMember({"fifo", "lifo"}));
    c->add_flag("--fixed", st->fixed, "replay sampled pairings and cross-check components");
    c->callback([&, mo, st] {
      action = [&, mo, st] {
        Params pr = mo->resolve();
        ExploreOptions eo;
        eo.stop = parse_stop(st->stop);
        eo.policy = parse_policy(st->policy);
        eo.start = 0;
        long long violations = 0;
        std::string first_failure;
        for (long long i = 0; i < st->trials; ++i) {
          RandomStream rs(st->seed, static_cast<std::uint64_t>(i));
          ExplorationTrace tr;
          std::optional<Matching> m;
          if (st->fixed) {
            m = sample_mask(sample_matching(pr, rs), pr.p, rs);
            tr = explore(*m, eo, rs);
          } else {
            tr = explore(pr, eo, rs);
          }
          IdentityReport rep = check_counter_identities(tr);
          bool ok = rep.pass;
          std::string why = rep.failure;
          if (ok && st->fixed) {
            ComponentSummary cs = components(*m);
            if (eo.stop == StopRule::kFullGraph && max_component_size(tr) != cs.max_size) {
              ok = false;
              why = "max component disagrees with the union-find summary";
            }
            if (eo.stop == StopRule::kFirstComponent &&
                component_size_of_start(tr) != cs.size_of[static_cast<std::size_t>(tr.start_vertex)]) {
              ok = false;
              why = "first component disagrees with the union-find summary";
            }
          }
          if (!ok) {
            ++violations;
            if (first_failure.empty())
              first_failure = "trial " + std::to_string(i) + ": " + why;
          }
        }
        ordered_json out;
        out["op"] = "verify-identities";
        ordered_json args = params_json(pr);
        args["trials"] = st->trials;
        args["seed"] = st->seed;
        args["stop"] = st->stop;
        args["policy"] = st->policy;
        args["fixed"] = st->fixed;
        out["args"] = args;
        out["violations"] = violations;
        if (!first_failure.empty()) out["first_failure"] = first_failure;
        out["pass"] = violations == 0;
        sink.open() << out.dump() << "\n";
        std::cerr << (violations == 0 ? "PASS" : "FAIL") << " identities: " << violations
                  << " violation(s) in " << st->trials << " traces\n";
        return violations == 0 ? kExitOk : kExitViolation;
      };
    });
  }
  {
    auto* c = ver->add_subcommand("coupling",
                                  "pathwise ordering of the comparison walks over fresh traces");
    auto mo = std::make_shared<ModelOpts>();
    mo->add_to(c, false);
    struct VArgs {
      long long trials = 100;
      std::uint64_t seed = 1;
      double m_slack = 0.0;
      long long t_prime = 0;
    };
    auto st = std::make_shared<VArgs>();
    c->add_option("--trials", st->trials);
    c->add_option("--seed", st->seed)->envname("REGULUS_SEED");
    auto* ms_opt = c->add_option("--m-slack", st->m_slack, "slack in the capped fresh envelope");
    auto* tp_opt = c->add_option("--t-prime", st->t_prime, "short horizon for the capped series");
    c->callback([&, mo, st, ms_opt, tp_opt] {
      action = [&, mo, st, ms_opt, tp_opt] {
        Params pr = mo->resolve();
        double m_slack = ms_opt->count() > 0 ? st->m_slack
                                             : std::sqrt(static_cast<double>(pr.n));
        long long t_prime = tp_opt->count() > 0
                                ? st->t_prime
                                : static_cast<long long>(std::floor(std::cbrt(
                                      static_cast<double>(pr.n) * pr.n)));
        ExploreOptions eo;
        eo.stop = StopRule::kFullGraph;
        eo.start = 0;
        long long violations = 0;
        std::string first_failure;
        for (long long i = 0; i < st->trials; ++i) {
          RandomStream rs(st->seed, static_cast<std::uint64_t>(i));
          ExplorationTrace tr = explore(pr, eo, rs);
          AuxRandomness aux = AuxRandomness::make(tr.steps.size(), m_slack, t_prime, rs);
          CouplingReport rep = check_coupling(tr, aux);
          if (!rep.pass) {
            ++violations;
            if (first_failure.empty())
              first_failure = "trial " + std::to_string(i) + ": " + rep.failure + " at step " +
                              std::to_string(rep.step);
          }
        }
        ordered_json out;
        out["op"] = "verify-coupling";
        ordered_json args = params_json(pr);
        args["trials"] = st->trials;
        args["seed"] = st->seed;
        args["m_slack"] = num(m_slack);
        args["t_prime"] = t_prime;
        out["args"] = args;
        out["violations"] = violations;
        if (!first_failure.empty()) out["first_failure"] = first_failure;
        out["pass"] = violations == 0;
        sink.open() << out.dump() << "\n";
        std::cerr << (violations == 0 ? "PASS" : "FAIL") << " coupling: " << violations
                  << " violation(s) in " << st->trials << " traces\n";
        return violations == 0 ? kExitOk : kExitViolation;
      };
    });
  }
  {
    auto* c = ver->add_subcommand("audit",
                                  "estimate a deviation event frequency against its bound");
    c->set_help_flag("--help", "print help");  // frees -h for the deviation size below
    auto mo = std::make_shared<ModelOpts>();
    mo->add_to(c, true);
    struct VArgs {
      std::string event;
      long long trials = 1000;
      std::uint64_t seed = 1;
      int threads = 1;
      double m = 0, h = 0, l = 0, omega = 0, theta = 0;
      bool json = false, stable = false, nohdr = false;
    };
    auto st = std::make_shared<VArgs>();
    st->threads = default_threads();
    std::vector<std::string> events = mc::audit_events();
    c->add_option("--event", st->event, "which deviation event to audit")
        ->required()
        ->check(CLI::IsMember(events));
    c->add_option("--trials", st->trials);
    c->add_option("--seed", st->seed)->envname("REGULUS_SEED");
    c->add_option("--threads", st->threads);
    auto* m_o = c->add_option("--m", st->m, "fresh-count slack");
    auto* h_o = c->add_option("--h", st->h, "deviation size");
    auto* l_o = c->add_option("--l", st->l, "partial-count slack");
    auto* w_o = c->add_option("--omega", st->omega, "active width");
    auto* t_o = c->add_option("--theta", st->theta, "retained nonfresh slack");
    c->add_flag("--json", st->json);
    c->add_flag("--stable-output", st->stable);
    c->add_flag("--no-header", st->nohdr);
    c->callback([&, mo, st, m_o, h_o, l_o, w_o, t_o] {
      action = [&, mo, st, m_o, h_o, l_o, w_o, t_o] {
        Params pr = mo->resolve();
        mc::AuditTunables tn;
        if (m_o->count() > 0) tn.m = st->m;
        if (h_o->count() > 0) tn.h = st->h;
        if (l_o->count() > 0) tn.l = st->l;
        if (w_o->count() > 0) tn.omega = st->omega;
        if (t_o->count() > 0) tn.theta = st->theta;
        mc::RunOptions ro;
        ro.threads = st->threads;
        mc::AuditReport rep = mc::lemma_audit(st->event, pr, st->trials, tn, st->seed, ro);
        std::ostream& os = sink.open();
        if (st->json) {
          os << mc::audit_json(rep, st->stable) << "\n";
        } else {
          if (!st->nohdr) os << mc::audit_csv_header() << "\n";
          os << mc::audit_csv_row(rep, st->stable) << "\n";
        }
        std::cerr << (rep.pass ? "PASS" : "FAIL") << " audit " << rep.event
                  << (rep.vacuous ? " (vacuous bound)" : "") << ": frequency "
                  << mc::format_sig(rep.frequency) << " vs bound " << mc::format_sig(rep.rhs)
                  << " over " << rep.trials << " trials\n";
        return rep.pass ? kExitOk : kExitViolation;
      };
    });
  }

  // -------------------------------------------------------------- scaling
  auto* sc = app.add_subcommand("scaling", "sweep the window width and fit the decay exponent");
  struct ScArgs {
    long long n = 0;
    int d = 0;
    double lambda = 0;
    std::vector<double> grid;
    long long trials = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    bool json = false, stable = false;
  };
  auto sc_st = std::make_shared<ScArgs>();
  sc_st->threads = default_threads();
  sc->add_option("--n", sc_st->n)->required();
  sc->add_option("--d", sc_st->d)->required();
  sc->add_option("--lambda", sc_st->lambda)->required();
  sc->add_option("--A-grid", sc_st->grid, "comma separated window widths")
      ->required()
      ->delimiter(',');
  sc->add_option("--trials", sc_st->trials, "trials per grid point");
  sc->add_option("--seed", sc_st->seed)->envname("REGULUS_SEED");
  sc->add_option("--threads", sc_st->threads);
  sc->add_flag("--json", sc_st->json);
  sc->add_flag("--stable-output", sc_st->stable);
  sc->callback([&, sc_st] {
    action = [&, sc_st] {
      mc::RunOptions ro;
      ro.threads = sc_st->threads;
      mc::ScalingReport rep = mc::scaling_diagnostic(sc_st->d, sc_st->n, sc_st->lambda,
                                                     sc_st->grid, sc_st->trials, sc_st->seed, ro);
      std::ostream& os = sink.open();
      if (sc_st->json) {
        os << mc::scaling_json(rep, sc_st->stable) << "\n";
      } else {
        os << mc::tail_csv_header() << "\n";
        for (const auto& pt : rep.points)
          os << mc::tail_csv_row(pt.estimate, sc_st->stable) << "\n";
      }
      std::cerr << "scaling: slope " << mc::format_sig(rep.slope) << " +/- "
                << mc::format_sig(rep.slope_se) << ", intercept "
                << mc::format_sig(rep.intercept)
                << (rep.monotone_decreasing ? ", monotone" : ", NOT monotone") << "\n";
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const theory::hypothesis_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::domain_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
}
