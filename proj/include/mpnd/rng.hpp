#pragma once

#include <cstdint>
#include <random>

namespace mpnd {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit Mersenne Twister with a portable [0,1) conversion, so draws do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent stream for (seed, a, b), e.g. (seed, batch, ant).
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(a + 0x632be59bd9b4e019ULL)) ^
               splitmix64(b + 0x85157af5ULL));
  }

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpnd
