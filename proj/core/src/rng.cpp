#include "naesat/rng.hpp"

#include "naesat/errors.hpp"

namespace naesat {

namespace {
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * kTwoPowMinus53; }

double Rng::uniform_open() {
  return static_cast<double>((engine_() >> 11) | 1U) * kTwoPowMinus53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidParameters("Rng::below: empty range");
  // Largest multiple of n representable below 2^64, minus one.
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n + 1) % n;
  std::uint64_t w = engine_();
  while (w > limit) w = engine_();
  return w % n;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t StreamFactory::seed_for(std::string_view label) const {
  return splitmix64(master_ ^ splitmix64(fnv1a64(label)));
}

}  // namespace naesat
