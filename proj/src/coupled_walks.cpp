#include "regulus/coupled_walks.hpp"

#include <cmath>
#include <stdexcept>

namespace regulus {

const char* series_name(SeriesKind k) {
  switch (k) {
    case SeriesKind::kEta:
      return "eta";
    case SeriesKind::kEtaPrime:
      return "eta-prime";
    case SeriesKind::kMu:
      return "mu";
    case SeriesKind::kMuPrime:
      return "mu-prime";
    case SeriesKind::kXi:
      return "xi";
    case SeriesKind::kDelta:
      return "delta";
    case SeriesKind::kDeltaPrime:
      return "delta-prime";
    case SeriesKind::kDelta2Prime:
      return "delta-2prime";
    case SeriesKind::kDeltaCap2Prime:
      return "delta-cap-2prime";
    case SeriesKind::kD:
      return "d";
    case SeriesKind::kDPrime:
      return "d-prime";
    case SeriesKind::kD2Prime:
      return "d-2prime";
  }
  return "?";
}

std::optional<SeriesKind> series_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(SeriesKind::kD2Prime); ++i) {
    auto k = static_cast<SeriesKind>(i);
    if (name == series_name(k)) return k;
  }
  return std::nullopt;
}

AuxRandomness AuxRandomness::make(std::size_t length, double m_slack, long long t_prime,
                                  RandomStream& rs) {
  AuxRandomness aux;
  aux.u.resize(length);
  for (auto& v : aux.u) v = rs.unit();
  aux.m_slack = m_slack;
  aux.t_prime = t_prime;
  return aux;
}

double a_fresh(long long i, long long n) {
  double di = static_cast<double>(i);
  return static_cast<double>(n) - 1.0 - di + di * di / (2.0 * static_cast<double>(n));
}

double mu_cap(long long i, long long n, int d, double m_slack) {
  double denom = static_cast<double>(d) * n - 2.0 * (i - 1) - 1.0;
  if (denom <= 0.0) throw std::invalid_argument("mu_cap: step beyond the pairing horizon");
  return d * (a_fresh(i - 1, n) + m_slack) / denom;
}

namespace {

struct StepView {
  bool retained;
  bool active_hit;
  bool fresh;
  bool one_short;
  bool partial;
  int m;
};

StepView view(const StepRecord& r) {
  StepView v;
  v.retained = r.retained != 0;
  v.active_hit = r.cls == HitClass::kActive;
  v.fresh = r.cls == HitClass::kFresh;
  v.one_short = r.cls == HitClass::kOneShort;
  v.partial = r.cls == HitClass::kPartial;
  v.m = r.unseen_m;
  return v;
}

double increment(SeriesKind kind, const StepView& s, long long i, long long n, int d,
                 const AuxRandomness& aux) {
  const double dd = d;
  switch (kind) {
    case SeriesKind::kEta:
      return (s.active_hit ? 0.0 : (s.retained ? s.m - 1.0 : 0.0)) -
             (s.active_hit ? 1.0 : 0.0) - 1.0;
    case SeriesKind::kEtaPrime:
      return (s.retained ? dd - 2.0 : 0.0) + (s.retained && s.fresh ? 1.0 : 0.0) - 1.0;
    case SeriesKind::kMu: {
      double c = mu_cap(i, n, d, aux.m_slack);
      return (s.retained ? dd - 2.0 : 0.0) +
             (s.retained && aux.u[i - 1] <= c ? 1.0 : 0.0) - 1.0;
    }
    case SeriesKind::kMuPrime: {
      double c = mu_cap(i, n, d, aux.m_slack);
      return s.retained && aux.u[i - 1] > c ? 1.0 : 0.0;
    }
    case SeriesKind::kXi:
      return (s.retained ? dd - 1.0 : 0.0) - 1.0;
    case SeriesKind::kDelta:
      return (s.retained && s.fresh ? dd - 1.0 : 0.0) +
             (s.retained && s.one_short ? dd - 2.0 : 0.0) -
             (s.active_hit ? 1.0 : 0.0) - 1.0;
    case SeriesKind::kDeltaPrime:
      return (s.retained && s.fresh ? dd - 1.0 : 0.0) - (s.active_hit ? 1.0 : 0.0) - 1.0;
    case SeriesKind::kDelta2Prime:
      return (s.retained && s.fresh ? dd - 1.0 : 0.0) - 1.0;
    case SeriesKind::kDeltaCap2Prime: {
      double cap = 1.0 - static_cast<double>(aux.t_prime) / static_cast<double>(n);
      return (s.retained && aux.u[i - 1] <= cap ? dd - 1.0 : 0.0) - 1.0;
    }
    case SeriesKind::kD:
      return (s.retained ? dd - 1.0 : 0.0) - 1.0;
    case SeriesKind::kDPrime:
      return aux.u[i - 1] <= 1.0 / (dd - 1.0) ? std::sqrt(dd - 2.0)
                                              : -1.0 / std::sqrt(dd - 2.0);
    case SeriesKind::kD2Prime:
      return aux.u[i - 1] <= 1.0 / (dd - 1.0) ? dd - 2.0 : -1.0;
  }
  throw std::logic_error("unknown series kind");
}

bool needs_aux(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::kMu:
    case SeriesKind::kMuPrime:
    case SeriesKind::kDeltaCap2Prime:
    case SeriesKind::kDPrime:
    case SeriesKind::kD2Prime:
      return true;
    default:
      return false;
  }
}

}  // namespace

IncrementSeries series(const ExplorationTrace& tr, SeriesKind kind,
                       const AuxRandomness& aux, std::optional<long long> horizon) {
  long long len = static_cast<long long>(tr.steps.size());
  if (horizon) {
    if (*horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    len = std::min(len, *horizon);
  }
  if (needs_aux(kind) && static_cast<long long>(aux.u.size()) < len)
    throw std::invalid_argument("auxiliary uniforms shorter than the series");
  IncrementSeries out;
  out.kind = kind;
  out.values.resize(static_cast<std::size_t>(len));
  for (long long i = 1; i <= len; ++i)
    out.values[static_cast<std::size_t>(i - 1)] =
        increment(kind, view(tr.steps[static_cast<std::size_t>(i - 1)]), i, tr.n, tr.d, aux);
  return out;
}

namespace {

CouplingReport coupling_fail(long long step, const std::string& what) {
  return {false, what, step};
}

}  // namespace

CouplingReport check_coupling(const ExplorationTrace& tr, const AuxRandomness& aux) {
  if (tr.phases.empty()) return coupling_fail(-1, "no phases");
  const int d = tr.d;
  const long long tau = tr.phases.front().last_step;
  if (static_cast<long long>(aux.u.size()) < tau)
    return coupling_fail(-1, "auxiliary uniforms shorter than the first phase");

  double active_walk = d;
  long long fresh_walk = tr.n - 1;
  for (long long i = 1; i <= tau; ++i) {
    const StepRecord& r = tr.steps[static_cast<std::size_t>(i - 1)];
    StepView s = view(r);

    double eta = increment(SeriesKind::kEta, s, i, tr.n, d, aux);
    double etap = increment(SeriesKind::kEtaPrime, s, i, tr.n, d, aux);
    double mu = increment(SeriesKind::kMu, s, i, tr.n, d, aux);
    double mup = increment(SeriesKind::kMuPrime, s, i, tr.n, d, aux);
    double xi = increment(SeriesKind::kXi, s, i, tr.n, d, aux);
    double del = increment(SeriesKind::kDelta, s, i, tr.n, d, aux);
    double delp = increment(SeriesKind::kDeltaPrime, s, i, tr.n, d, aux);
    double del2p = increment(SeriesKind::kDelta2Prime, s, i, tr.n, d, aux);
    double bigd = increment(SeriesKind::kD, s, i, tr.n, d, aux);

    if (!(delp <= del)) return coupling_fail(i, "delta' > delta");
    if (!(del <= eta)) return coupling_fail(i, "delta > eta");
    if (!(eta <= etap)) return coupling_fail(i, "eta > eta'");
    if (!(etap <= xi)) return coupling_fail(i, "eta' > xi");
    if (xi != mu + mup) return coupling_fail(i, "xi != mu + mu'");
    if (!(delp <= del2p)) return coupling_fail(i, "delta' > delta''");
    if (!(bigd >= del)) return coupling_fail(i, "D < delta");

    // Exact gap between the retained walk and the delta walk.
    double gap = (s.retained && s.one_short ? 1.0 : 0.0) +
                 (s.retained && s.partial ? d - 1.0 : 0.0) +
                 (s.active_hit ? 1.0 + (s.retained ? d - 1.0 : 0.0) : 0.0);
    if (bigd - del != gap) return coupling_fail(i, "D - delta decomposition fails");

    active_walk += eta;
    if (active_walk != static_cast<double>(r.active_after))
      return coupling_fail(i, "eta walk disagrees with the active count");

    if (s.fresh) --fresh_walk;
    if (fresh_walk != r.fresh_after)
      return coupling_fail(i, "fresh walk disagrees with the fresh count");
  }
  if (tr.phases.front().closed && active_walk != 0.0)
    return coupling_fail(tau, "eta walk does not drain at the phase end");
  return {};
}

std::optional<long long> first_hit(const IncrementSeries& s, long long start) {
  double w = static_cast<double>(start);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    w += s.values[i];
    if (w <= 0.0) return static_cast<long long>(i + 1);
  }
  return std::nullopt;
}

}  // namespace regulus
