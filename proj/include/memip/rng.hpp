// Deterministic random numbers.  All stochastic code in the library draws
// through this wrapper so that results are reproducible bit-for-bit across
// platforms and thread counts: the distributions are implemented by hand on
// top of the mt19937_64 bit stream (the standard library's distribution
// objects are not specified to be portable).
#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace memip {

// SplitMix64 step; used to decorrelate seeds and derive substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // Independent substream: stream(seed, i) and stream(seed, j) are
  // decorrelated for i != j, and each is a pure function of (seed, index).
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // Strictly positive exponential variate with the given rate.
  double exponential(double rate) {
    double u;
    do {
      u = u01();
    } while (u <= 0.0);
    return -std::log(u) / rate;  // u ~ U(0,1), so -log(u) > 0
  }

  bool bernoulli(double p) { return u01() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace memip
