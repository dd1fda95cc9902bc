#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "regulus/params.hpp"
#include "regulus/random.hpp"

namespace regulus {

// Stub (v, i) is encoded as v*d + i. kNoPartner marks an unmatched stub.
using Stub = std::uint32_t;
inline constexpr Stub kNoPartner = 0xffffffffu;

inline long long stub_vertex(Stub s, int d) { return static_cast<long long>(s) / d; }
inline int stub_slot(Stub s, int d) { return static_cast<int>(s % static_cast<Stub>(d)); }

struct Matching {
  long long n = 0;
  int d = 0;
  std::vector<Stub> partner;            // size n*d
  std::vector<std::uint8_t> retained;   // empty until a mask is sampled

  long long stub_count() const { return n * static_cast<long long>(d); }
  bool complete() const;
  bool has_mask() const { return !retained.empty(); }
};

// Uniform perfect matching on the n*d stubs: repeatedly take the lowest
// unmatched stub and pair it with a uniform pick from the remaining pool.
Matching sample_matching(const Params& params, RandomStream& rs);

// No loops and no repeated vertex pair.
bool is_simple(const Matching& m);

// Independent keep/delete marks, one per matched pair, drawn in increasing
// order of the pair's lower stub.
Matching sample_mask(Matching m, double p, RandomStream& rs);

struct ComponentSummary {
  std::vector<long long> sizes;     // descending
  std::vector<long long> size_of;   // per vertex
  long long max_size = 0;
};

// Reference component structure of the retained subgraph, via union-find.
// Requires a complete matching with a mask.
ComponentSummary components(const Matching& m);

// Text dump: "n d p seed" header, then one "u.i v.j r" line per pair in
// increasing order of the lower stub.
void write_matching(std::ostream& os, const Matching& m, double p, std::uint64_t seed);

// Canonical one-line encoding of the pairing, for uniformity tests.
std::string matching_key(const Matching& m);

}  // namespace regulus
