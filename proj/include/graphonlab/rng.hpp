#pragma once

#include <cstdint>
#include <random>

namespace graphonlab {

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Seedable stream family: stream(seed, k) yields independent reproducible
// generators. Uniform doubles are derived from raw bits so results do not
// depend on libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  static Rng stream(uint64_t seed, uint64_t stream_id) {
    uint64_t s = seed ^ 0x2545f4914f6cdd1dULL;
    uint64_t mix = s;
    (void)detail::splitmix64(mix);
    mix ^= stream_id * 0x9e3779b97f4a7c15ULL;
    return Rng(detail::splitmix64(mix));
  }

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0,1).
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return eng_() % n; }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace graphonlab
