#pragma once

#include <cmath>
#include <cstdint>

namespace eikograph {

// Counter-based splittable generator. Each value is a pure function of
// (key, counter), so independent streams can be handed to parallel workers
// and replayed from a single seed. The mixer is the splitmix64 finalizer.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kSalt)) {}

  // Derives an independent substream. Children of distinct ids never
  // collide with the parent sequence or with each other in practice.
  Rng stream(std::uint64_t id) const {
    return Rng(mix(key_ ^ mix(id + kStreamSalt)), 0);
  }

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGolden); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (polar form avoided to keep the
  // draw count per call fixed, which makes streams easier to reason about).
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t index_below(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny relative to 2^64.
    return next_u64() % n;
  }

 private:
  Rng(std::uint64_t key, std::uint64_t ctr) : key_(key), ctr_(ctr) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kSalt = 0x8BADF00D5EEDULL;
  static constexpr std::uint64_t kStreamSalt = 0xC0FFEE123456789ull;

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace eikograph
