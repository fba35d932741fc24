#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace tfz {

// splitmix64 finalizer. Full-period bijection on u64.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-free combination of a base seed with stream coordinates, used to
// derive one independent stream per (signal, snr, repetition) style cell.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(base ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ mix64(a ^ 0x13198a2e03707344ULL));
  h = mix64(h ^ mix64(b ^ 0xa4093822299f31d0ULL));
  h = mix64(h ^ mix64(c ^ 0x082efa98ec4e6c89ULL));
  return h;
}

// Counter-based generator: draw i of stream `key` is a pure function of
// (key, i). Identical sequences regardless of worker count or platform,
// which std::mt19937 + std::normal_distribution do not guarantee.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + ctr_++ * 0x9e3779b97f4a7c15ULL); }

  // Uniform on (0, 1]: never returns 0, safe under log().
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Box-Muller, one fresh pair per call; the sine branch is discarded so a
  // draw never depends on call parity.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  void fill_gaussian(std::span<double> out) {
    for (double& v : out) v = next_gaussian();
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace tfz
