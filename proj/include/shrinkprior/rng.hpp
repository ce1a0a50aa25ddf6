#ifndef SHRINKPRIOR_RNG_HPP
#define SHRINKPRIOR_RNG_HPP

#include <cmath>
#include <cstdint>

namespace shrinkprior {

// Counter-based generator: draw n of a stream is mix64(key + (n+1) * GAMMA),
// where mix64 is the SplitMix64 finalizer. Streams are derived as
//   key = mix64(mix64(mix64(seed) ^ id0) ^ id1)
// so replications can be assigned ids and produce identical output no matter
// how work is scheduled across threads.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static CounterRng stream(std::uint64_t seed, std::uint64_t id0 = 0, std::uint64_t id1 = 0) {
    return CounterRng(mix64(mix64(mix64(seed) ^ id0) ^ id1));
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform on (0,1): 53 mantissa bits offset off the endpoints.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller with the companion draw cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1), Marsaglia-Tsang. Shapes below 1 go through the
  // Gamma(shape+1) boost.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double g = next_gamma(shape + 1.0);
      return g * std::pow(next_unit(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_unit();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    return x / (x + y);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace shrinkprior

#endif
