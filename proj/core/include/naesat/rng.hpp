#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace naesat {

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is fixed by the standard) and maps raw 64-bit words to values with
/// library-defined arithmetic, so every draw is reproducible across standard
/// library implementations.
///
/// Draw mapping:
///   uniform01()      (w >> 11) * 2^-53                      in [0, 1)
///   uniform_open()   ((w >> 11) | 1) * 2^-53, odd multiples  in (0, 1)
///   below(n)         rejection sampling on w, returns w % n  in [0, n)
///   coin()           lowest bit of w
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  /// Odd multiples of 2^-53: never 0, never 1/2, never 1, and 1 - u is exact.
  double uniform_open();
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (engine_() & 1U) != 0; }

  // UniformRandomBitGenerator, so std::shuffle and friends accept an Rng.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Label-hashed substreams of one master seed. The seed of stream `label` is
/// splitmix64(master ^ splitmix64(fnv1a64(label))). Identical (master, label)
/// pairs give identical streams.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }
  std::uint64_t seed_for(std::string_view label) const;
  Rng stream(std::string_view label) const { return Rng(seed_for(label)); }

 private:
  std::uint64_t master_;
};

}  // namespace naesat
