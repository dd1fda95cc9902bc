#include "regulus/matching.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace regulus {

bool Matching::complete() const {
  if (partner.size() != static_cast<std::size_t>(stub_count())) return false;
  for (Stub s = 0; s < partner.size(); ++s) {
    Stub q = partner[s];
    if (q == kNoPartner || q >= partner.size() || q == s || partner[q] != s) return false;
  }
  return true;
}

Matching sample_matching(const Params& params, RandomStream& rs) {
  params.validate();
  Matching m;
  m.n = params.n;
  m.d = params.d;
  const std::uint64_t ns = static_cast<std::uint64_t>(m.stub_count());
  m.partner.assign(ns, kNoPartner);

  // Pool of unmatched stubs with position index for O(1) removal.
  std::vector<Stub> pool(ns);
  std::vector<std::uint32_t> pos(ns);
  for (std::uint64_t i = 0; i < ns; ++i) {
    pool[i] = static_cast<Stub>(i);
    pos[i] = static_cast<std::uint32_t>(i);
  }
  auto remove = [&](Stub s) {
    std::uint32_t i = pos[s];
    Stub last = pool.back();
    pool[i] = last;
    pos[last] = i;
    pool.pop_back();
  };

  for (Stub s = 0; s < ns; ++s) {
    if (m.partner[s] != kNoPartner) continue;
    remove(s);
    Stub q = pool[rs.below(pool.size())];
    remove(q);
    m.partner[s] = q;
    m.partner[q] = s;
  }
  return m;
}

bool is_simple(const Matching& m) {
  if (!m.complete()) throw std::invalid_argument("is_simple: matching is not complete");
  const int d = m.d;
  for (long long v = 0; v < m.n; ++v) {
    long long nb[8];
    for (int i = 0; i < d; ++i) {
      Stub s = static_cast<Stub>(v * d + i);
      long long w = stub_vertex(m.partner[s], d);
      if (w == v) return false;  // loop
      nb[i] = w;
    }
    // insertion sort of <= 8 entries, then adjacent duplicate scan
    for (int i = 1; i < d; ++i) {
      long long key = nb[i];
      int j = i - 1;
      while (j >= 0 && nb[j] > key) {
        nb[j + 1] = nb[j];
        --j;
      }
      nb[j + 1] = key;
    }
    for (int i = 1; i < d; ++i)
      if (nb[i] == nb[i - 1]) return false;  // double edge
  }
  return true;
}

Matching sample_mask(Matching m, double p, RandomStream& rs) {
  if (!m.complete()) throw std::invalid_argument("sample_mask: matching is not complete");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  m.retained.assign(m.partner.size(), 0);
  for (Stub s = 0; s < m.partner.size(); ++s) {
    Stub q = m.partner[s];
    if (q < s) continue;  // visit each pair once, from its lower stub
    std::uint8_t keep = rs.bernoulli(p) ? 1 : 0;
    m.retained[s] = keep;
    m.retained[q] = keep;
  }
  return m;
}

ComponentSummary components(const Matching& m) {
  if (!m.complete()) throw std::invalid_argument("components: matching is not complete");
  if (!m.has_mask()) throw std::invalid_argument("components: no retention mask");
  std::vector<long long> par(m.n), sz(m.n, 1);
  for (long long v = 0; v < m.n; ++v) par[v] = v;
  auto find = [&](long long v) {
    while (par[v] != v) {
      par[v] = par[par[v]];
      v = par[v];
    }
    return v;
  };
  for (Stub s = 0; s < m.partner.size(); ++s) {
    Stub q = m.partner[s];
    if (q < s || !m.retained[s]) continue;
    long long a = find(stub_vertex(s, m.d)), b = find(stub_vertex(q, m.d));
    if (a == b) continue;
    if (sz[a] < sz[b]) std::swap(a, b);
    par[b] = a;
    sz[a] += sz[b];
  }
  ComponentSummary out;
  out.size_of.resize(m.n);
  for (long long v = 0; v < m.n; ++v) {
    long long r = find(v);
    out.size_of[v] = sz[r];
    if (r == v) out.sizes.push_back(sz[r]);
  }
  std::sort(out.sizes.rbegin(), out.sizes.rend());
  out.max_size = out.sizes.empty() ? 0 : out.sizes.front();
  return out;
}

void write_matching(std::ostream& os, const Matching& m, double p, std::uint64_t seed) {
  if (!m.complete()) throw std::invalid_argument("write_matching: matching is not complete");
  os << m.n << ' ' << m.d << ' ' << p << ' ' << seed << '\n';
  for (Stub s = 0; s < m.partner.size(); ++s) {
    Stub q = m.partner[s];
    if (q < s) continue;
    int r = m.has_mask() ? m.retained[s] : 1;
    os << stub_vertex(s, m.d) << '.' << stub_slot(s, m.d) << ' '
       << stub_vertex(q, m.d) << '.' << stub_slot(q, m.d) << ' ' << r << '\n';
  }
}

std::string matching_key(const Matching& m) {
  std::string key;
  key.reserve(m.partner.size() * 3);
  for (Stub s = 0; s < m.partner.size(); ++s) {
    Stub q = m.partner[s];
    if (q < s) continue;
    key += std::to_string(s);
    key += '-';
    key += std::to_string(q);
    key += ';';
  }
  return key;
}

}  // namespace regulus
