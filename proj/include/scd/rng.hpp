#pragma once

#include <cmath>
#include <cstdint>

namespace scd {

// Counter-based generator: every draw is a pure integer hash of
// (seed, stream, counter), so a given (seed, stream) pair replays the same
// sequence on any platform and draws never depend on call-site history.
// Independent parts of a run (per epoch / batch / view / tensor) get their
// own stream via child().
class RngState {
 public:
  RngState() = default;
  RngState(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  static RngState from_seed(std::uint64_t seed) { return RngState(seed, 0); }

  // Derives a disjoint stream; chain calls for nested scopes,
  // e.g. rng.child(epoch).child(batch).child(view).
  RngState child(std::uint64_t tag) const {
    return RngState(seed_, mix64(stream_ ^ mix64(tag ^ 0xA02BDBF7BB3C0A7ULL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    const std::uint64_t base = mix64(seed_ ^ 0x243F6A8885A308D3ULL) ^ stream_;
    return mix64(base + 0x9E3779B97F4A7C15ULL * ++counter_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer in [0, bound) without modulo bias worth caring about
  // at these bounds (bound << 2^64).
  std::uint64_t next_below(std::uint64_t bound) {
    return bound ? next_u64() % bound : 0;
  }

 private:
  static std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace scd
