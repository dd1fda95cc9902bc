#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regulus/exploration.hpp"
#include "regulus/random.hpp"

namespace regulus {

// Increment series built step by step on one shared exploration trace plus
// one shared auxiliary uniform per step. Their whole point is pathwise
// comparability, so every series reads the same trace and the same U_i.
//
//   kEta        exact active-set increment
//   kEtaPrime   drop the partial-hit contribution, round fresh hits up
//   kMu         retained * (d-2) plus a capped fresh indicator via U_i
//   kMuPrime    the complementary piece of the cap split
//   kXi         (d-1) * retained - 1
//   kDelta      fresh/one-short increments, active hits kept
//   kDeltaPrime fresh increments only, active hits kept
//   kDelta2Prime fresh increments only, active hits dropped
//   kDeltaCap2Prime fresh indicator replaced by the U_i <= 1 - T'/n cap
//   kD          (d-1) * retained - 1 (kept separate from kXi by convention)
//   kDPrime     i.i.d. mean-zero unit-variance two-point law from U_i
//   kD2Prime    i.i.d. copy of the xi law from U_i
enum class SeriesKind {
  kEta,
  kEtaPrime,
  kMu,
  kMuPrime,
  kXi,
  kDelta,
  kDeltaPrime,
  kDelta2Prime,
  kDeltaCap2Prime,
  kD,
  kDPrime,
  kD2Prime,
};

const char* series_name(SeriesKind k);
std::optional<SeriesKind> series_from_name(const std::string& name);

// Auxiliary randomness shared across series: one uniform per step, plus the
// slack used by the capped fresh indicator and the short horizon used by the
// capped variant of the delta series.
struct AuxRandomness {
  std::vector<double> u;
  double m_slack = 0.0;
  long long t_prime = 0;

  static AuxRandomness make(std::size_t length, double m_slack, long long t_prime,
                            RandomStream& rs);
};

struct IncrementSeries {
  SeriesKind kind;
  std::vector<double> values;  // integer-valued except kDPrime
};

// a(i) = n - 1 - i + i^2 / (2n), the fresh-count envelope.
double a_fresh(long long i, long long n);

// Cap threshold used by the kMu / kMuPrime split at step i (1-based).
double mu_cap(long long i, long long n, int d, double m_slack);

// Build one series over the first min(horizon, steps) steps of the trace.
IncrementSeries series(const ExplorationTrace& tr, SeriesKind kind,
                       const AuxRandomness& aux,
                       std::optional<long long> horizon = std::nullopt);

struct CouplingReport {
  bool pass = true;
  std::string failure;
  long long step = -1;
};

// Pathwise ordering and decomposition checks over the first phase of the
// trace: delta' <= delta <= eta <= eta' <= xi, xi = mu + mu', D >= delta with
// the exact gap decomposition, and the fresh-count identity.
CouplingReport check_coupling(const ExplorationTrace& tr, const AuxRandomness& aux);

// First time start + partial sums drop to zero or below; empty if never.
std::optional<long long> first_hit(const IncrementSeries& s, long long start);

}  // namespace regulus
