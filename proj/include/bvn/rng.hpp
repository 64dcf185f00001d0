#pragma once

#include <cstdint>
#include <random>

namespace bvn {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to spread seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (master, index). Trials seeded this
// way can run in any order or in parallel without sharing state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x51ed2701));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1).
inline double uniform01_open(Rng& rng) {
  double u;
  do {
    u = uniform01(rng);
  } while (u <= 0.0);
  return u;
}

inline double beta_draw(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  double x = 0.0, y = 0.0;
  do {
    x = ga(rng);
    y = gb(rng);
  } while (x + y <= 0.0);
  return x / (x + y);
}

}  // namespace bvn
