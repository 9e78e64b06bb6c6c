#pragma once

// Seeded randomness with a stream that is identical on every platform.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard.  The distributions in <random> are not, so all conversions from
// raw 64-bit words are done here.

#include <cmath>
#include <cstdint>
#include <random>

namespace parcell {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; never zero, so -log(u) is finite.
  double uniform_open_closed() { return 1.0 - uniform(); }

  // Uniform integer on [0, n) by rejection, unbiased for any n > 0.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Exponential waiting time for total rate r.
  double exponential(double r) { return -std::log(uniform_open_closed()) / r; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace parcell
