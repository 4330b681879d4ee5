#ifndef DOCKALLOC_RNG_HPP_
#define DOCKALLOC_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace dockalloc {

/// Counter-based generator: output k of stream s under seed is a pure function of
/// (seed, s, k), so results do not depend on how work is split across threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

  /// Poisson sample by inversion of summed exponentials; fine for small means.
  long long poisson(double mean) noexcept {
    if (!(mean > 0.0)) return 0;
    long long k = 0;
    double t = exponential(1.0);
    while (t < mean) {
      ++k;
      t += exponential(1.0);
    }
    return k;
  }

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dockalloc

#endif  // DOCKALLOC_RNG_HPP_
