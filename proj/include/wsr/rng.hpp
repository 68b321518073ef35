// SPDX-License-Identifier: Apache-2.0

#ifndef WSR_RNG_HPP
#define WSR_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace wsr {

/// SplitMix64 generator (Steele/Lea/Vigna). All randomness in this library is
/// drawn from this single declared algorithm so that scenarios and solver
/// initializations are reproducible byte-for-byte for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0, 1]; the open lower end keeps log() finite.
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// One Box-Muller pair of independent N(0,1) samples.
  void gaussian_pair(double& z0, double& z1) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  /// Circularly-symmetric complex Gaussian CN(0,1): real and imaginary parts
  /// are independent N(0, 1/2). Consumes exactly one Box-Muller pair.
  std::complex<double> complex_gaussian() {
    double z0 = 0.0, z1 = 0.0;
    gaussian_pair(z0, z1);
    return {z0 * M_SQRT1_2, z1 * M_SQRT1_2};
  }

 private:
  std::uint64_t state_;
};

/// Decorrelated stream seed for auxiliary draws (solver initialization,
/// trial points) so they do not replay the scenario stream.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t tag) {
  SplitMix64 g(base);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i <= tag; ++i) s = g.next();
  return s;
}

}  // namespace wsr

#endif  // WSR_RNG_HPP
