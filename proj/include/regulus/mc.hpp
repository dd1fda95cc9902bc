#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regulus/params.hpp"

namespace regulus::mc {

enum class TailMode { kVertex, kMax };

struct RunOptions {
  int threads = 1;
  bool clopper_pearson = false;  // otherwise Wilson
  double confidence = 0.95;
  std::uint64_t stream_offset = 0;  // trial i uses stream stream_offset + i
  std::optional<double> threshold_override;  // absolute size threshold instead of A * n^{2/3}
};

// One estimation run. Trials are indexed globally and each trial has its own
// random stream, so the estimate is a pure function of (seed, trials) no
// matter how many threads carve up the range.
struct TailEstimate {
  long long n = 0;
  int d = 0;
  std::optional<double> p;
  std::optional<double> lambda;
  std::optional<double> A;
  std::string mode;  // "vertex", "max" or "simple"
  bool conditioned_simple = false;
  long long trials = 0;
  long long successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
};

// P(component size threshold exceeded). kVertex explores the component of
// vertex 0 only; kMax sweeps the whole graph and stops a trial as soon as any
// phase crosses the threshold. conditioned_simple switches to rejection
// sampling of loop-free, multi-edge-free pairings before percolation.
TailEstimate run_tail(const Params& params, TailMode mode, bool conditioned_simple,
                      long long trials, std::uint64_t seed, const RunOptions& opt = {});

// Fraction of pairings with no loops or double edges.
TailEstimate estimate_simple_prob(long long n, int d, long long trials, std::uint64_t seed,
                                  const RunOptions& opt = {});

// Tunables for the concentration audits; events resolve their own defaults
// and echo what they used.
struct AuditTunables {
  std::optional<double> m;      // fresh-count envelope slack
  std::optional<double> h;      // sum-deviation slack
  std::optional<double> l;      // partially-seen vertex slack
  std::optional<double> omega;  // active-set width
  std::optional<double> theta;  // retained-hit slack
};

struct AuditReport {
  std::string event;
  long long n = 0;
  int d = 0;
  double p = 0.0;
  std::optional<double> lambda;
  double A = 0.0;
  long long horizon = 0;
  long long trials = 0;
  long long exceedances = 0;
  double frequency = 0.0;
  double rhs = 0.0;   // tail bound with all constants set to 1
  double se = 0.0;    // binomial standard error of the frequency
  bool vacuous = false;  // rhs >= 1: nothing to test, no trials run
  bool pass = false;     // vacuous, or frequency <= rhs + 3 se
  std::map<std::string, double> tunables;  // resolved values
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
};

// Events:
//   fresh-count          fresh vertices exceed their envelope a(i) + m
//   mu-prime-sum         capped-indicator sum falls below q(T) - h
//   partial-unseen       partially seen vertices exceed i^2/n + l
//   active-width         active set exceeds omega within the first phase
//   active-nonfresh-sum  partial and active hits outrun their cubic curve
//   retained-nonfresh-sum retained non-fresh hits outrun the drift curve
//   drift-gap            retained-minus-delta gap outruns the drift curve,
//                        conditioned on a simple pairing
std::vector<std::string> audit_events();
AuditReport lemma_audit(const std::string& event, const Params& params, long long trials,
                        const AuditTunables& tunables, std::uint64_t seed,
                        const RunOptions& opt = {});

struct ScalingPoint {
  double A = 0.0;
  TailEstimate estimate;
  bool flagged_low = false;  // too few successes to use in the fit
  double g = 0.0;            // rate exponent at this A
  double y = 0.0;            // log p_hat + (3/2) log A
};

struct ScalingReport {
  int d = 0;
  long long n = 0;
  double lambda = 0.0;
  std::vector<ScalingPoint> points;
  bool monotone_decreasing = false;
  double slope = 0.0;      // fit of y against -g over unflagged points
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_upper_half = 0.0;  // same fit over the larger-A half
  long long min_successes = 0;
};

ScalingReport scaling_diagnostic(int d, long long n, double lambda,
                                 const std::vector<double>& A_grid, long long trials,
                                 std::uint64_t seed, const RunOptions& opt = {});

// CSV and JSON mirrors. stable zeroes the wall-clock field so byte-identical
// output across thread counts and machines is meaningful.
std::string tail_csv_header();
std::string tail_csv_row(const TailEstimate& e, bool stable);
std::string tail_json(const TailEstimate& e, bool stable);
TailEstimate tail_from_csv_row(const std::string& row);
TailEstimate tail_from_json(const std::string& text);

std::string audit_csv_header();
std::string audit_csv_row(const AuditReport& r, bool stable);
std::string audit_json(const AuditReport& r, bool stable);
AuditReport audit_from_json(const std::string& text);

std::string scaling_json(const ScalingReport& r, bool stable);

// %.12g formatting shared by every emitter.
std::string format_sig(double v);

}  // namespace regulus::mc
