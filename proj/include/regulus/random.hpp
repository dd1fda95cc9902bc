#pragma once

#include <cmath>
#include <cstdint>

namespace regulus {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stafford variant 13 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

// Counter-mode generator: output i of stream s is a pure function of
// (seed, s, i). Trials get their own stream index, which is what makes
// Monte Carlo results independent of how trials are sliced across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(seed ^ detail::mix64((stream + 1) * detail::kGolden))) {}

  std::uint64_t u64() { return detail::mix64(key_ + (++ctr_) * detail::kGolden); }

  // [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe as a log argument.
  double unit_pos() { return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  // Uniform in [0, n) without modulo bias (multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t cut = (-n) % n;
      while (lo < cut) {
        m = static_cast<unsigned __int128>(u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(unit_pos()));
    double a = 6.283185307179586477 * unit();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace regulus
