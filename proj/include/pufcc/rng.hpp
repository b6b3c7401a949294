#pragma once

#include <cstdint>
#include <limits>

namespace pufcc {

// Counter-based generator built on the splitmix64 output hash.  Each stream
// is a pure function of (seed, stream_id), so trial-level randomness does not
// depend on how trials are distributed over workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream_id + 0xbf58476d1ce4e5b9ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in the open interval (0, 1).
  double next_open01() {
    std::uint64_t x = next_u64() >> 11;  // 53 bits
    if (x == 0) x = 1;
    return static_cast<double>(x) * 0x1p-53;
  }

  bool next_bernoulli(double p) { return next_open01() < p; }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  // For std::shuffle-style usage.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace pufcc
