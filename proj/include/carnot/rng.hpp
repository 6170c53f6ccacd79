#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace carnot
{

// All randomness in a run funnels through this generator. The uniform
// conversion is done by hand so that streams are identical across standard
// library implementations.
class Rng
{
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream keyed by a label (job id, fixture name). Does
  // not advance this generator.
  Rng fork(std::string_view label) const
  {
    std::uint64_t h = 1469598103934665603ull ^ mix(seed_);
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return Rng(mix(h));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t mix(std::uint64_t x)
  {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace carnot
