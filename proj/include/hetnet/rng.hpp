#ifndef HETNET_RNG_HPP
#define HETNET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace hetnet {

// Deterministic random stream. The engine (mt19937_64) has a
// standard-defined output sequence, and all variate transforms below are
// spelled out explicitly, so the same seed produces the same draws on any
// platform. (The std::*_distribution adapters are implementation-defined,
// which is exactly what this avoids.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Unit-mean exponential.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 step; used to derive independent child seeds from a master
// seed plus a stream tag without correlating the streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hetnet

#endif  // HETNET_RNG_HPP
